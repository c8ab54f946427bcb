//! Reduction of linear secure code matrices to standard form.
//!
//! A linear secure code is a generation matrix applied to the stacked input
//! vector `(K, K_1, .., K_t, W, M_1, .., M_t)`. The pipeline here minimizes
//! such a matrix (no unused columns, full row rank), brings it to reduced
//! row echelon form, reads off the *marked* key coordinate that masks each
//! row, prunes unmarked key symbols, removes encoder-private randomness, and
//! finally extracts an equivalent conventional code on the message symbols
//! left over after pinning. Each stage re-verifies decodability and secrecy
//! rather than assuming they are preserved.
//!
//! The marking step doubles as a structural secrecy criterion: a minimal
//! matrix admits a full marking exactly when the code is perfectly secure
//! (an unmarked leading entry would broadcast a pure message combination).

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::conventional::{verify_zero_error, LinearCode, ZeroErrorOutcome};
use crate::field::FieldMatrix;
use crate::problem::{Instance, KeyProfile};
use crate::secure::{verify_decoding, verify_perfect_secrecy, LinearSecureCode, SecureCode};
use crate::{Error, Result};

/// Which column block a coordinate lives in, in the fixed column order
/// `K | K_1 .. K_t | W | M_1 .. M_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockId {
    Common,
    Private(usize),
    Randomness,
    Message(usize),
}

/// Column-block widths of a code matrix, in the fixed order above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    pub l_k: usize,
    pub l_ki: Vec<usize>,
    pub l_w: usize,
    pub l_i: Vec<usize>,
}

impl BlockLayout {
    pub fn new(l_k: usize, l_ki: Vec<usize>, l_w: usize, l_i: Vec<usize>) -> Self {
        BlockLayout {
            l_k,
            l_ki,
            l_w,
            l_i,
        }
    }

    pub fn from_keys(keys: &KeyProfile, msg_lens: &[usize]) -> Result<Self> {
        if keys.l_ki.len() != msg_lens.len() {
            return Err(Error::Dimension(format!(
                "{} private keys for {} receivers",
                keys.l_ki.len(),
                msg_lens.len()
            )));
        }
        Ok(BlockLayout {
            l_k: keys.l_k,
            l_ki: keys.l_ki.clone(),
            l_w: keys.l_w,
            l_i: msg_lens.to_vec(),
        })
    }

    pub fn t(&self) -> usize {
        self.l_i.len()
    }

    pub fn key_profile(&self) -> KeyProfile {
        KeyProfile::new(self.l_k, self.l_ki.clone(), self.l_w)
    }

    /// Columns holding keys or randomness (everything left of the messages).
    pub fn key_cols(&self) -> usize {
        self.l_k + self.l_ki.iter().sum::<usize>() + self.l_w
    }

    pub fn msg_cols(&self) -> usize {
        self.l_i.iter().sum()
    }

    pub fn total_cols(&self) -> usize {
        self.key_cols() + self.msg_cols()
    }

    pub fn common_key_range(&self) -> Range<usize> {
        0..self.l_k
    }

    pub fn private_key_range(&self, i: usize) -> Range<usize> {
        let start = self.l_k + self.l_ki[..i].iter().sum::<usize>();
        start..start + self.l_ki[i]
    }

    pub fn randomness_range(&self) -> Range<usize> {
        let start = self.l_k + self.l_ki.iter().sum::<usize>();
        start..start + self.l_w
    }

    pub fn message_range(&self, i: usize) -> Range<usize> {
        let start = self.key_cols() + self.l_i[..i].iter().sum::<usize>();
        start..start + self.l_i[i]
    }

    /// Block and in-block coordinate of an absolute column.
    pub fn col_block(&self, col: usize) -> (BlockId, usize) {
        let mut c = col;
        if c < self.l_k {
            return (BlockId::Common, c);
        }
        c -= self.l_k;
        for (i, &w) in self.l_ki.iter().enumerate() {
            if c < w {
                return (BlockId::Private(i), c);
            }
            c -= w;
        }
        if c < self.l_w {
            return (BlockId::Randomness, c);
        }
        c -= self.l_w;
        for (i, &w) in self.l_i.iter().enumerate() {
            if c < w {
                return (BlockId::Message(i), c);
            }
            c -= w;
        }
        panic!("column {col} out of range");
    }
}

/// Generation matrix of a linear secure code together with its column-block
/// layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMatrix {
    pi: FieldMatrix,
    layout: BlockLayout,
}

impl CodeMatrix {
    pub fn new(pi: FieldMatrix, layout: BlockLayout) -> Result<Self> {
        if pi.cols() != layout.total_cols() {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, layout spans {}",
                pi.cols(),
                layout.total_cols()
            )));
        }
        if layout.l_ki.len() != layout.l_i.len() {
            return Err(Error::Dimension(format!(
                "{} private key blocks for {} message blocks",
                layout.l_ki.len(),
                layout.l_i.len()
            )));
        }
        Ok(CodeMatrix { pi, layout })
    }

    pub fn pi(&self) -> &FieldMatrix {
        &self.pi
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn modulus(&self) -> u16 {
        self.pi.modulus()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CodeMatrixFile::from(self)).expect("matrix serializes")
    }

    pub fn parse(text: &str) -> Result<CodeMatrix> {
        let file: CodeMatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("code matrix: {e}")))?;
        file.into_code_matrix()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct BlocksFile {
    pub l_k: usize,
    pub l_ki: Vec<usize>,
    pub l_w: usize,
    pub l_i: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct CodeMatrixFile {
    pub p: u16,
    pub blocks: BlocksFile,
    pub rows: Vec<Vec<u16>>,
}

impl From<&CodeMatrix> for CodeMatrixFile {
    fn from(cm: &CodeMatrix) -> Self {
        CodeMatrixFile {
            p: cm.modulus(),
            blocks: BlocksFile {
                l_k: cm.layout.l_k,
                l_ki: cm.layout.l_ki.clone(),
                l_w: cm.layout.l_w,
                l_i: cm.layout.l_i.clone(),
            },
            rows: (0..cm.pi.rows()).map(|r| cm.pi.row(r)).collect(),
        }
    }
}

impl CodeMatrixFile {
    pub(crate) fn into_code_matrix(self) -> Result<CodeMatrix> {
        let layout = BlockLayout::new(
            self.blocks.l_k,
            self.blocks.l_ki,
            self.blocks.l_w,
            self.blocks.l_i,
        );
        let pi = FieldMatrix::from_rows(&self.rows, layout.total_cols(), self.p)?;
        CodeMatrix::new(pi, layout)
    }
}

/// One marked coordinate: the key or randomness symbol serving as the
/// leading 1 of a row of the echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mark {
    pub row: usize,
    pub block: BlockId,
    pub coord: usize,
}

impl Mark {
    fn to_file(&self) -> MarkFile {
        let block = match self.block {
            BlockId::Common => "K".to_string(),
            BlockId::Private(i) => format!("K_{}", i + 1),
            BlockId::Randomness => "W".to_string(),
            BlockId::Message(i) => format!("M_{}", i + 1),
        };
        MarkFile {
            row: self.row + 1,
            block,
            coord: self.coord + 1,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct MarkFile {
    pub row: usize,
    pub block: String,
    pub coord: usize,
}

/// A code matrix in reduced row echelon form whose every row is marked by a
/// key or randomness coordinate (never a message coordinate).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedForm {
    cm: CodeMatrix,
    marks: Vec<Mark>,
}

impl MarkedForm {
    pub fn code_matrix(&self) -> &CodeMatrix {
        &self.cm
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    /// Row indices whose mark sits in the given block kind.
    fn rows_marked(&self, pred: impl Fn(BlockId) -> bool) -> Vec<usize> {
        self.marks
            .iter()
            .filter(|m| pred(m.block))
            .map(|m| m.row)
            .collect()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct StandardFormFile<'a> {
            p: u16,
            blocks: BlocksFile,
            rows: Vec<Vec<u16>>,
            marking: Vec<MarkFile>,
            #[serde(skip_serializing_if = "Option::is_none")]
            instance: Option<&'a serde_json::Value>,
        }
        let base = CodeMatrixFile::from(&self.cm);
        serde_json::to_string_pretty(&StandardFormFile {
            p: base.p,
            blocks: base.blocks,
            rows: base.rows,
            marking: self.marks.iter().map(|m| m.to_file()).collect(),
            instance: None,
        })
        .expect("marked form serializes")
    }
}

/// Builds the linear secure code view of a matrix for verification.
fn as_secure(cm: &CodeMatrix, instance: &Instance) -> Result<SecureCode> {
    Ok(SecureCode::Linear(LinearSecureCode::new(
        instance.clone(),
        cm.clone(),
    )?))
}

/// Runs both verifiers and reports the first failure as an error.
fn verify_both(cm: &CodeMatrix, instance: &Instance, cap: u64, stage: &str) -> Result<()> {
    let code = as_secure(cm, instance)?;
    match verify_decoding(&code, cap)? {
        crate::secure::DecodingOutcome::Pass => {}
        crate::secure::DecodingOutcome::Fail { receiver, input } => {
            return Err(Error::Precondition(format!(
                "{stage}: receiver {} fails to decode on input {input:?}",
                receiver + 1
            )))
        }
    }
    match verify_perfect_secrecy(&code, cap)? {
        crate::secure::SecrecyOutcome::Pass => Ok(()),
        crate::secure::SecrecyOutcome::Fail { m, m_prime, c } => Err(Error::Precondition(format!(
            "{stage}: secrecy fails, p(C={c:?}|M) differs between m={m:?} and m'={m_prime:?}"
        ))),
    }
}

/// Deletes unused (all-zero) key and randomness columns and dependent rows,
/// shrinking the block layout accordingly. The input must already be a
/// zero-error perfectly secure code; both properties are re-verified on the
/// output.
pub fn minimize(cm: &CodeMatrix, instance: &Instance, cap: u64) -> Result<CodeMatrix> {
    verify_both(cm, instance, cap, "minimize input")?;

    // A verified code cannot have an all-zero message column: that symbol
    // would reach no receiver. Zero columns are therefore unused key or
    // randomness symbols.
    let mut keep_cols = Vec::new();
    let mut layout = cm.layout().clone();
    for col in 0..cm.pi().cols() {
        if cm.pi().col_is_zero(col) {
            match cm.layout().col_block(col) {
                (BlockId::Common, _) => layout.l_k -= 1,
                (BlockId::Private(i), _) => layout.l_ki[i] -= 1,
                (BlockId::Randomness, _) => layout.l_w -= 1,
                (BlockId::Message(_), _) => {
                    return Err(Error::Internal(
                        "verified code has an unused message symbol".into(),
                    ))
                }
            }
        } else {
            keep_cols.push(col);
        }
    }
    let pruned = cm.pi().select_cols(&keep_cols);

    // Keep the first maximal independent set of rows, in order.
    let mut keep_rows = Vec::new();
    let mut acc: Option<FieldMatrix> = None;
    let mut rank = 0usize;
    for r in 0..pruned.rows() {
        let row = pruned.select_rows(&[r]);
        let candidate = match &acc {
            None => row.clone(),
            Some(a) => a.vstack(&row)?,
        };
        if candidate.rank() > rank {
            rank += 1;
            keep_rows.push(r);
            acc = Some(candidate);
        }
    }
    let minimized = CodeMatrix::new(pruned.select_rows(&keep_rows), layout)?;
    verify_both(&minimized, instance, cap, "minimize output")?;
    Ok(minimized)
}

/// Brings a minimal code matrix to reduced row echelon form and marks each
/// row by the key or randomness coordinate carrying its leading 1.
///
/// A leading 1 inside a message block means some invertible combination of
/// the public symbols is a function of messages alone, which contradicts
/// perfect secrecy; that input is rejected with a security violation. For
/// minimal matrices this marking succeeds exactly when the code is
/// perfectly secure, which makes it a structural counterpart to the
/// exhaustive secrecy verifier.
pub fn echelon_mark(cm: &CodeMatrix) -> Result<MarkedForm> {
    let (rref, pivots) = cm.pi().rref();
    if pivots.len() != cm.pi().rows() {
        return Err(Error::Precondition(
            "matrix is not full row rank; minimize it first".into(),
        ));
    }
    let mut marks = Vec::with_capacity(pivots.len());
    for (row, &col) in pivots.iter().enumerate() {
        match cm.layout().col_block(col) {
            (BlockId::Message(_), _) => return Err(Error::SecurityViolation { row }),
            (block, coord) => marks.push(Mark { row, block, coord }),
        }
    }
    Ok(MarkedForm {
        cm: CodeMatrix::new(rref, cm.layout().clone())?,
        marks,
    })
}

/// Fixes every unmarked key or randomness coordinate to zero and removes
/// its column. Idempotent; decodability and secrecy are re-verified.
pub fn prune_unmarked_keys(mf: &MarkedForm, instance: &Instance, cap: u64) -> Result<MarkedForm> {
    let cm = &mf.cm;
    let key_cols = cm.layout().key_cols();
    let marked: BTreeSet<usize> = mf
        .marks
        .iter()
        .map(|m| block_col(cm.layout(), m.block, m.coord))
        .collect();

    let mut keep_cols = Vec::new();
    let mut layout = cm.layout().clone();
    for col in 0..cm.pi().cols() {
        if col < key_cols && !marked.contains(&col) {
            match cm.layout().col_block(col) {
                (BlockId::Common, _) => layout.l_k -= 1,
                (BlockId::Private(i), _) => layout.l_ki[i] -= 1,
                (BlockId::Randomness, _) => layout.l_w -= 1,
                (BlockId::Message(_), _) => unreachable!("message columns are never key columns"),
            }
        } else {
            keep_cols.push(col);
        }
    }
    let pruned = CodeMatrix::new(cm.pi().select_cols(&keep_cols), layout)?;
    let remarked = echelon_mark(&pruned)?;
    verify_both(remarked.code_matrix(), instance, cap, "prune_unmarked_keys")?;
    Ok(remarked)
}

/// Deletes the rows marked by encoder-randomness coordinates together with
/// the randomness columns. Those rows are masked from every receiver and
/// the eavesdropper alike, so removing them must preserve decodability; a
/// failure here means the input was not a verified marked form.
pub fn drop_private_randomness(
    mf: &MarkedForm,
    instance: &Instance,
    cap: u64,
) -> Result<MarkedForm> {
    let cm = &mf.cm;
    if mf.marks.len() != cm.pi().rows() {
        return Err(Error::Precondition(
            "marking does not cover all rows".into(),
        ));
    }
    let marked: BTreeSet<usize> = mf
        .marks
        .iter()
        .map(|m| block_col(cm.layout(), m.block, m.coord))
        .collect();
    if (0..cm.layout().key_cols()).any(|c| !marked.contains(&c)) {
        return Err(Error::Precondition(
            "unmarked key coordinates remain; prune them first".into(),
        ));
    }

    let keep_rows: Vec<usize> = mf
        .marks
        .iter()
        .filter(|m| m.block != BlockId::Randomness)
        .map(|m| m.row)
        .collect();
    let w_range = cm.layout().randomness_range();
    let keep_cols: Vec<usize> = (0..cm.pi().cols())
        .filter(|c| !w_range.contains(c))
        .collect();

    let mut layout = cm.layout().clone();
    layout.l_w = 0;
    let reduced = CodeMatrix::new(
        cm.pi().select_rows(&keep_rows).select_cols(&keep_cols),
        layout,
    )?;
    let remarked = echelon_mark(&reduced)?;
    verify_both(
        remarked.code_matrix(),
        instance,
        cap,
        "drop_private_randomness",
    )
    .map_err(|e| match e {
        Error::Precondition(msg) => Error::Internal(format!(
            "removing randomness-marked rows broke the code: {msg}"
        )),
        other => other,
    })?;
    Ok(remarked)
}

fn block_col(layout: &BlockLayout, block: BlockId, coord: usize) -> usize {
    match block {
        BlockId::Common => layout.common_key_range().start + coord,
        BlockId::Private(i) => layout.private_key_range(i).start + coord,
        BlockId::Randomness => layout.randomness_range().start + coord,
        BlockId::Message(i) => layout.message_range(i).start + coord,
    }
}

/// Checks the block-diagonal identity structure of a standard form: rows
/// `0..l_k` marked by consecutive common-key coordinates, followed by each
/// receiver's private-key rows, with no randomness left.
fn check_standard_form(mf: &MarkedForm) -> Result<()> {
    let layout = mf.cm.layout();
    if layout.l_w != 0 {
        return Err(Error::Internal("standard form retains randomness".into()));
    }
    let expected_rows = layout.l_k + layout.l_ki.iter().sum::<usize>();
    if mf.cm.pi().rows() != expected_rows {
        return Err(Error::Internal(format!(
            "standard form has {} rows, expected l_k + sum l_ki = {expected_rows}",
            mf.cm.pi().rows()
        )));
    }
    let mut expect: Vec<(BlockId, usize)> = Vec::new();
    for c in 0..layout.l_k {
        expect.push((BlockId::Common, c));
    }
    for (i, &w) in layout.l_ki.iter().enumerate() {
        for c in 0..w {
            expect.push((BlockId::Private(i), c));
        }
    }
    for (mark, (block, coord)) in mf.marks.iter().zip(expect.iter()) {
        if mark.block != *block || mark.coord != *coord {
            return Err(Error::Internal(format!(
                "mark {:?} does not match expected identity structure {:?}({})",
                mark, block, coord
            )));
        }
    }
    Ok(())
}

/// Full normalization pipeline: minimize, echelon-mark, prune unmarked key
/// symbols, and drop encoder randomness. The result has `l_k + sum(l_ki)`
/// rows with identity blocks on the key columns and the message block
/// `Gamma` on the right; every public symbol contains exactly one key
/// symbol.
pub fn to_standard_form(cm: &CodeMatrix, instance: &Instance, cap: u64) -> Result<MarkedForm> {
    let minimized = minimize(cm, instance, cap)?;
    let marked = echelon_mark(&minimized)?;
    verify_both(marked.code_matrix(), instance, cap, "echelon form")?;
    let pruned = prune_unmarked_keys(&marked, instance, cap)?;
    let standard = drop_private_randomness(&pruned, instance, cap)?;
    check_standard_form(&standard)?;
    Ok(standard)
}

/// Coordinate pinning: given that `X` is recoverable from the public
/// system `AX + BY` together with the private system `CX + DY`, finds a set
/// `S` of at most `rows(C)` coordinates of `X` such that `X` is recoverable
/// from `AX + BY` and the pinned entries `X(i), i in S`.
///
/// Processes the private rows top to bottom: a row that is not needed is
/// discarded; otherwise the lowest-index entry of `X` whose recovery
/// depends on that row is pinned in its place.
pub fn pin_subset(
    a: &FieldMatrix,
    b: &FieldMatrix,
    c: &FieldMatrix,
    d: &FieldMatrix,
) -> Result<Vec<usize>> {
    let n = a.cols();
    let m = b.cols();
    let p = a.modulus();
    if a.rows() != b.rows() || c.rows() != d.rows() || c.cols() != n || d.cols() != m {
        return Err(Error::Dimension(
            "pin_subset blocks have inconsistent shapes".into(),
        ));
    }

    let glue = |left: &FieldMatrix, right: &FieldMatrix| -> Result<Vec<Vec<u16>>> {
        Ok((0..left.rows())
            .map(|r| {
                let mut row = left.row(r);
                row.extend(right.row(r));
                row
            })
            .collect())
    };
    let public_rows = glue(a, b)?;
    let private_rows = glue(c, d)?;

    let unit_row = |j: usize| -> Vec<u16> {
        let mut v = vec![0u16; n + m];
        v[j] = 1;
        v
    };

    let build = |extra_private: &[usize], pins: &BTreeSet<usize>| -> Result<FieldMatrix> {
        let mut rows = public_rows.clone();
        for &r in extra_private {
            rows.push(private_rows[r].clone());
        }
        for &j in pins {
            rows.push(unit_row(j));
        }
        FieldMatrix::from_rows(&rows, n + m, p)
    };

    let recoverable_coord =
        |sys: &FieldMatrix, j: usize| -> Result<bool> { sys.row_space_contains(&unit_row(j)) };
    let recoverable_all = |sys: &FieldMatrix| -> Result<bool> {
        for j in 0..n {
            if !recoverable_coord(sys, j)? {
                return Ok(false);
            }
        }
        Ok(true)
    };

    // Precondition: X recoverable from the two systems together.
    let full = build(&(0..c.rows()).collect::<Vec<_>>(), &BTreeSet::new())?;
    if !recoverable_all(&full)? {
        return Err(Error::Precondition(
            "X is not recoverable from the public and private systems".into(),
        ));
    }

    let mut pins: BTreeSet<usize> = BTreeSet::new();
    let mut remaining: Vec<usize> = (0..c.rows()).collect();
    for r in 0..c.rows() {
        remaining.retain(|&x| x != r);
        let without = build(&remaining, &pins)?;
        if recoverable_all(&without)? {
            continue; // this private row is not needed
        }
        // pin the lowest-index entry whose recovery depends on this row
        let mut pinned = None;
        for j in 0..n {
            if pins.contains(&j) {
                continue;
            }
            if !recoverable_coord(&without, j)? {
                pinned = Some(j);
                break;
            }
        }
        let j = pinned.ok_or_else(|| {
            Error::Internal("row is needed but no coordinate depends on it".into())
        })?;
        pins.insert(j);
    }

    // The pinned public system must recover X on its own.
    let final_sys = build(&[], &pins)?;
    if !recoverable_all(&final_sys)? {
        return Err(Error::Internal(
            "pinning procedure lost recoverability".into(),
        ));
    }
    Ok(pins.into_iter().collect())
}

/// Result of extracting the conventional code underlying a standard form.
#[derive(Debug, Clone)]
pub struct ExtractedConventional {
    pub code: LinearCode,
    pub reduced: Instance,
    /// Per receiver, the pinned (removed, fixed-to-zero) coordinates of its
    /// message, 0-based ascending.
    pub pinned: Vec<Vec<usize>>,
}

/// Extracts a conventional zero-error code of length `l_k` over the reduced
/// message lengths `[l_i - l_ki]+` from a standard form: per receiver, the
/// private-key-marked rows are traded for pinned message coordinates via
/// [`pin_subset`], the pinned coordinates are fixed to zero, and the
/// common-key-marked rows' message parts become the encoder.
pub fn extract_conventional(
    mf: &MarkedForm,
    instance: &Instance,
    cap: u64,
) -> Result<ExtractedConventional> {
    check_standard_form(mf).map_err(|e| match e {
        Error::Internal(msg) => Error::Precondition(format!("not a standard form: {msg}")),
        other => other,
    })?;
    let cm = &mf.cm;
    let layout = cm.layout();
    let t = instance.receivers();
    if instance.msg_lens() != layout.l_i {
        return Err(Error::Dimension(
            "instance message lengths do not match the matrix layout".into(),
        ));
    }

    let k_rows = mf.rows_marked(|b| b == BlockId::Common);
    let mut pinned: Vec<Vec<usize>> = Vec::with_capacity(t);
    for i in 0..t {
        let ki_rows = mf.rows_marked(|b| b == BlockId::Private(i));
        let x_cols: Vec<usize> = layout.message_range(i).collect();
        let y_cols: Vec<usize> = (0..t)
            .filter(|&j| j != i && !instance.side_info(i).contains(&j))
            .flat_map(|j| layout.message_range(j))
            .collect();

        let a = cm.pi().select_rows(&k_rows).select_cols(&x_cols);
        let b = cm.pi().select_rows(&k_rows).select_cols(&y_cols);
        let c = cm.pi().select_rows(&ki_rows).select_cols(&x_cols);
        let d = cm.pi().select_rows(&ki_rows).select_cols(&y_cols);
        let mut pins = pin_subset(&a, &b, &c, &d)?;

        // Pad deterministically so the reduced length is exactly
        // [l_i - l_ki]+ (revealing more coordinates never hurts).
        let target = layout.l_i[i].min(layout.l_ki[i]);
        let mut next = 0usize;
        while pins.len() < target {
            if !pins.contains(&next) {
                pins.push(next);
            }
            next += 1;
        }
        pins.sort_unstable();
        pinned.push(pins);
    }

    let reduced_lens: Vec<usize> = (0..t).map(|i| layout.l_i[i] - pinned[i].len()).collect();
    let expected: Vec<usize> = (0..t)
        .map(|i| layout.l_i[i].saturating_sub(layout.l_ki[i]))
        .collect();
    if reduced_lens != expected {
        return Err(Error::Internal(format!(
            "reduced lengths {reduced_lens:?} differ from [l_i - l_ki]+ = {expected:?}"
        )));
    }

    // Encoder: message part of the common-key rows, restricted to the
    // unpinned coordinates.
    let keep_cols: Vec<usize> = (0..t)
        .flat_map(|i| {
            let range = layout.message_range(i);
            let pins = &pinned[i];
            range
                .enumerate()
                .filter(|(j, _)| !pins.contains(j))
                .map(|(_, col)| col)
                .collect::<Vec<_>>()
        })
        .collect();
    let encode = cm.pi().select_rows(&k_rows).select_cols(&keep_cols);
    let reduced = instance.with_msg_lens(reduced_lens)?;
    let code = LinearCode::derive(&reduced, encode)?;
    match verify_zero_error(&code, &reduced, cap)? {
        ZeroErrorOutcome::Pass => Ok(ExtractedConventional {
            code,
            reduced,
            pinned,
        }),
        ZeroErrorOutcome::Counterexample { msg, receiver } => Err(Error::Internal(format!(
            "extracted code fails zero-error at msg {msg:?}, receiver {}",
            receiver + 1
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet as Set;

    const CAP: u64 = 1 << 22;

    fn single_receiver(len: usize) -> Instance {
        Instance::new(2, vec![Set::new()], vec![len]).unwrap()
    }

    fn xor_instance() -> Instance {
        Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#).unwrap()
    }

    /// Pi = [1 | 1 1] for C = K + M_1 + M_2 on the XOR instance.
    fn xor_gotp_matrix() -> CodeMatrix {
        CodeMatrix::new(
            FieldMatrix::from_rows(&[vec![1, 1, 1]], 3, 2).unwrap(),
            BlockLayout::new(1, vec![0, 0], 0, vec![1, 1]),
        )
        .unwrap()
    }

    /// Pi = [I_n | I_n] for the n-symbol one-time pad.
    fn pad_matrix(n: usize) -> CodeMatrix {
        let mut pi = FieldMatrix::zero(n, 2 * n, 2).unwrap();
        for r in 0..n {
            pi.set(r, r, 1);
            pi.set(r, n + r, 1);
        }
        CodeMatrix::new(pi, BlockLayout::new(n, vec![0], 0, vec![n])).unwrap()
    }

    /// Per-message pads (M_1 + K_1, M_2 + K_2) with no common key.
    fn private_pad_matrix() -> CodeMatrix {
        CodeMatrix::new(
            FieldMatrix::from_rows(&[vec![1, 0, 1, 0], vec![0, 1, 0, 1]], 4, 2).unwrap(),
            BlockLayout::new(0, vec![1, 1], 0, vec![1, 1]),
        )
        .unwrap()
    }

    #[test]
    fn layout_column_blocks() {
        let layout = BlockLayout::new(2, vec![1, 0], 1, vec![2, 1]);
        assert_eq!(layout.total_cols(), 7);
        assert_eq!(layout.key_cols(), 4);
        assert_eq!(layout.col_block(0), (BlockId::Common, 0));
        assert_eq!(layout.col_block(2), (BlockId::Private(0), 0));
        assert_eq!(layout.col_block(3), (BlockId::Randomness, 0));
        assert_eq!(layout.col_block(4), (BlockId::Message(0), 0));
        assert_eq!(layout.col_block(6), (BlockId::Message(1), 0));
    }

    #[test]
    fn echelon_mark_single_xor_row() {
        let mf = echelon_mark(&xor_gotp_matrix()).unwrap();
        assert_eq!(mf.marks().len(), 1);
        assert_eq!(mf.marks()[0].block, BlockId::Common);
        assert_eq!(mf.marks()[0].coord, 0);
    }

    #[test]
    fn echelon_mark_rejects_pure_message_row() {
        // C = M_1: the single row has its leading 1 in a message block
        let cm = CodeMatrix::new(
            FieldMatrix::from_rows(&[vec![1, 0]], 2, 2).unwrap(),
            BlockLayout::new(0, vec![0, 0], 0, vec![1, 1]),
        )
        .unwrap();
        assert!(matches!(
            echelon_mark(&cm),
            Err(Error::SecurityViolation { row: 0 })
        ));
    }

    #[test]
    fn echelon_mark_private_pads() {
        let mf = echelon_mark(&private_pad_matrix()).unwrap();
        assert_eq!(mf.marks()[0].block, BlockId::Private(0));
        assert_eq!(mf.marks()[1].block, BlockId::Private(1));
    }

    #[test]
    fn echelon_mark_requires_full_row_rank() {
        let cm = CodeMatrix::new(
            FieldMatrix::from_rows(&[vec![1, 1, 1], vec![1, 1, 1]], 3, 2).unwrap(),
            BlockLayout::new(1, vec![0, 0], 0, vec![1, 1]),
        )
        .unwrap();
        assert!(matches!(echelon_mark(&cm), Err(Error::Precondition(_))));
    }

    #[test]
    fn echelon_mark_flags_unused_key_with_message_pivot() {
        // C = M_1 + M_2 with a key column that is never used: insecure
        let cm = CodeMatrix::new(
            FieldMatrix::from_rows(&[vec![0, 1, 1]], 3, 2).unwrap(),
            BlockLayout::new(1, vec![0, 0], 0, vec![1, 1]),
        )
        .unwrap();
        assert!(matches!(
            echelon_mark(&cm),
            Err(Error::SecurityViolation { row: 0 })
        ));
    }

    #[test]
    fn minimize_strips_zero_key_column_and_duplicate_row() {
        // XOR pad with an extra unused common key column and a duplicated row
        let pi = FieldMatrix::from_rows(&[vec![1, 0, 1, 1], vec![1, 0, 1, 1]], 4, 2).unwrap();
        let cm = CodeMatrix::new(pi, BlockLayout::new(2, vec![0, 0], 0, vec![1, 1])).unwrap();
        let min = minimize(&cm, &xor_instance(), CAP).unwrap();
        assert_eq!(min.pi().rows(), 1);
        assert_eq!(min.layout().l_k, 1);
        assert_eq!(min.pi().row(0), vec![1, 1, 1]);
    }

    #[test]
    fn minimize_is_fixed_point_on_standard_codes() {
        let inst = xor_instance();
        let cm = xor_gotp_matrix();
        assert_eq!(minimize(&cm, &inst, CAP).unwrap(), cm);
        let pad = pad_matrix(2);
        assert_eq!(minimize(&pad, &single_receiver(2), CAP).unwrap(), pad);
    }

    #[test]
    fn minimize_rejects_insecure_input() {
        let cm = CodeMatrix::new(
            FieldMatrix::from_rows(&[vec![1, 0]], 2, 2).unwrap(),
            BlockLayout::new(0, vec![0, 0], 0, vec![1, 1]),
        )
        .unwrap();
        assert!(minimize(&cm, &xor_instance(), CAP).is_err());
    }

    #[test]
    fn prune_is_idempotent() {
        // pad with an unused key column survives minimize as exercised above;
        // here feed a marked form through prune twice
        let mf = echelon_mark(&xor_gotp_matrix()).unwrap();
        let once = prune_unmarked_keys(&mf, &xor_instance(), CAP).unwrap();
        let twice = prune_unmarked_keys(&once, &xor_instance(), CAP).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn randomness_rows_are_dropped() {
        // C_1 = K + M_1 + M_2, C_2 = W(1): the second row is pure noise
        let pi = FieldMatrix::from_rows(&[vec![1, 0, 1, 1], vec![0, 1, 0, 0]], 4, 2).unwrap();
        let cm = CodeMatrix::new(pi, BlockLayout::new(1, vec![0, 0], 1, vec![1, 1])).unwrap();
        let inst = xor_instance();
        let standard = to_standard_form(&cm, &inst, CAP).unwrap();
        assert_eq!(standard.code_matrix().layout().l_w, 0);
        assert_eq!(standard.code_matrix().pi().rows(), 1);
        assert_eq!(standard.code_matrix().pi().row(0), vec![1, 1, 1]);
    }

    #[test]
    fn standard_form_fixed_point_on_gotp_code() {
        let inst = xor_instance();
        let standard = to_standard_form(&xor_gotp_matrix(), &inst, CAP).unwrap();
        assert_eq!(standard.code_matrix(), &xor_gotp_matrix());
        assert_eq!(standard.marks().len(), 1);
    }

    #[test]
    fn pin_subset_trivial_cases() {
        // no private rows: nothing to pin
        let a = FieldMatrix::identity(3, 2).unwrap();
        let b = FieldMatrix::zero(3, 0, 2).unwrap();
        let c = FieldMatrix::zero(0, 3, 2).unwrap();
        let d = FieldMatrix::zero(0, 0, 2).unwrap();
        assert_eq!(pin_subset(&a, &b, &c, &d).unwrap(), Vec::<usize>::new());

        // no public rows, private identity: every entry must be pinned
        let a = FieldMatrix::zero(0, 3, 2).unwrap();
        let b = FieldMatrix::zero(0, 2, 2).unwrap();
        let c = FieldMatrix::identity(3, 2).unwrap();
        let d = FieldMatrix::zero(3, 2, 2).unwrap();
        assert_eq!(pin_subset(&a, &b, &c, &d).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn pin_subset_rejects_unrecoverable_systems() {
        // one equation, two unknowns of X
        let a = FieldMatrix::from_rows(&[vec![1, 1]], 2, 2).unwrap();
        let b = FieldMatrix::zero(1, 0, 2).unwrap();
        let c = FieldMatrix::zero(0, 2, 2).unwrap();
        let d = FieldMatrix::zero(0, 0, 2).unwrap();
        assert!(matches!(
            pin_subset(&a, &b, &c, &d),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn extract_from_shannon_pad_is_identity_code() {
        let inst = single_receiver(3);
        let standard = to_standard_form(&pad_matrix(3), &inst, CAP).unwrap();
        let out = extract_conventional(&standard, &inst, CAP).unwrap();
        assert_eq!(out.reduced.msg_lens(), &[3]);
        assert_eq!(out.code.len(), 3);
        assert_eq!(
            out.code.encode_matrix(),
            &FieldMatrix::identity(3, 2).unwrap()
        );
        assert!(out.pinned[0].is_empty());
    }

    #[test]
    fn extract_from_xor_gotp_is_the_xor_code() {
        let inst = xor_instance();
        let standard = to_standard_form(&xor_gotp_matrix(), &inst, CAP).unwrap();
        let out = extract_conventional(&standard, &inst, CAP).unwrap();
        assert_eq!(out.reduced.msg_lens(), &[1, 1]);
        assert_eq!(out.code.len(), 1);
        assert_eq!(out.code.encode_matrix().row(0), vec![1, 1]);
    }

    #[test]
    fn extract_with_full_private_keys_reduces_to_nothing() {
        let inst = xor_instance();
        let standard = to_standard_form(&private_pad_matrix(), &inst, CAP).unwrap();
        let out = extract_conventional(&standard, &inst, CAP).unwrap();
        assert_eq!(out.reduced.msg_lens(), &[0, 0]);
        assert_eq!(out.code.len(), 0);
        assert_eq!(out.pinned, vec![vec![0], vec![0]]);
    }

    #[test]
    fn round_trip_on_random_secure_codes() {
        // sample random matrices and layouts, keep the ones that happen to
        // be zero-error and perfectly secure, and push each through the
        // full reduction
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(0xd1ce);
        let mut found = 0u32;
        let mut attempts = 0u64;
        while found < 25 {
            attempts += 1;
            assert!(attempts < 500_000, "sampling stalled at {found} codes");
            let t = rng.gen_range(1..=2usize);
            let l_k = rng.gen_range(0..=2usize);
            let l_ki: Vec<usize> = (0..t).map(|_| rng.gen_range(0..=1usize)).collect();
            let l_w = rng.gen_range(0..=1usize);
            let l_i: Vec<usize> = (0..t).map(|_| rng.gen_range(1..=2usize)).collect();
            let layout = BlockLayout::new(l_k, l_ki, l_w, l_i.clone());
            let rows = rng.gen_range(1..=3usize);
            let pi =
                FieldMatrix::from_fn(rows, layout.total_cols(), 2, |_, _| rng.gen_range(0..2u16))
                    .unwrap();
            let cm = CodeMatrix::new(pi, layout).unwrap();

            let mut side_info = vec![Set::new(); t];
            if t == 2 && rng.gen_bool(0.5) {
                side_info[0].insert(1);
                side_info[1].insert(0);
            }
            let inst = Instance::new(2, side_info, l_i).unwrap();
            let Ok(code) = LinearSecureCode::new(inst.clone(), cm.clone()) else {
                continue;
            };
            let code = SecureCode::Linear(code);
            if !verify_decoding(&code, CAP).unwrap().passed()
                || !verify_perfect_secrecy(&code, CAP).unwrap().passed()
            {
                continue;
            }
            found += 1;

            let standard = to_standard_form(&cm, &inst, CAP).unwrap();
            let layout = standard.code_matrix().layout();
            assert_eq!(
                standard.code_matrix().pi().rows(),
                layout.l_k + layout.l_ki.iter().sum::<usize>()
            );
            let extracted = extract_conventional(&standard, &inst, CAP).unwrap();
            let expected: Vec<usize> = layout
                .l_i
                .iter()
                .zip(layout.l_ki.iter())
                .map(|(&l, &k)| l.saturating_sub(k))
                .collect();
            assert_eq!(extracted.reduced.msg_lens(), expected);
            assert_eq!(extracted.code.len(), layout.l_k);
        }
    }

    #[test]
    fn code_matrix_json_roundtrip() {
        let cm = xor_gotp_matrix();
        let json = cm.to_json();
        let back = CodeMatrix::parse(&json).unwrap();
        assert_eq!(cm, back);
        assert!(json.contains("\"l_k\": 1"));
    }

    #[test]
    fn marked_form_json_mentions_blocks() {
        let mf = echelon_mark(&private_pad_matrix()).unwrap();
        let json = mf.to_json();
        assert!(json.contains("\"K_1\""), "{json}");
        assert!(json.contains("\"K_2\""), "{json}");
    }
}
