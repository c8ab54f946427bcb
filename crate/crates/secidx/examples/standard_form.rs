//! The reduction pipeline, stage by stage: a linear secure code with an
//! unused key column and an encoder-randomness row is minimized, brought to
//! reduced row echelon form with its key marking, stripped of unmarked keys
//! and randomness, and finally traded for the conventional code hiding
//! inside it.
//!
//! Run with: cargo run --release --example standard_form

use secidx::field::FieldMatrix;
use secidx::linreduce::{
    echelon_mark, extract_conventional, minimize, to_standard_form, BlockLayout, CodeMatrix,
};
use secidx::problem::Instance;
use secidx::DEFAULT_SECURE_CAP;

fn show(title: &str, cm: &CodeMatrix) {
    let layout = cm.layout();
    println!(
        "{title}: l = {}, blocks (l_k={}, l_ki={:?}, l_w={}, l_i={:?})",
        cm.pi().rows(),
        layout.l_k,
        layout.l_ki,
        layout.l_w,
        layout.l_i
    );
    for r in 0..cm.pi().rows() {
        println!("  {:?}", cm.pi().row(r));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cap = DEFAULT_SECURE_CAP;
    let instance = Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#)?;

    // columns: K(1) K(2) | K_1(1) | W(1) | M_1 M_2
    // row 1: K(1) + M_1 + M_2   (the padded XOR)
    // row 2: K_1(1) + M_1       (a private pad for receiver 1)
    // row 3: W(1)               (pure encoder noise)
    // K(2) is never used.
    let pi = FieldMatrix::from_rows(
        &[
            vec![1, 0, 0, 0, 1, 1],
            vec![0, 0, 1, 0, 1, 0],
            vec![0, 0, 0, 1, 0, 0],
        ],
        6,
        2,
    )?;
    let cm = CodeMatrix::new(pi, BlockLayout::new(2, vec![1, 0], 1, vec![1, 1]))?;
    show("input", &cm);

    let minimized = minimize(&cm, &instance, cap)?;
    show("\nafter minimize (unused K(2) column dropped)", &minimized);

    let marked = echelon_mark(&minimized)?;
    println!("\nmarking after echelon form:");
    for mark in marked.marks() {
        let block = match mark.block {
            secidx::linreduce::BlockId::Common => "K".to_string(),
            secidx::linreduce::BlockId::Private(i) => format!("K_{}", i + 1),
            secidx::linreduce::BlockId::Randomness => "W".to_string(),
            secidx::linreduce::BlockId::Message(i) => format!("M_{}", i + 1),
        };
        println!(
            "  row {} is masked by {block}({})",
            mark.row + 1,
            mark.coord + 1
        );
    }

    let standard = to_standard_form(&cm, &instance, cap)?;
    show(
        "\nstandard form (randomness row gone)",
        standard.code_matrix(),
    );

    let extracted = extract_conventional(&standard, &instance, cap)?;
    println!(
        "\nextracted conventional code: length {}, reduced message lengths {:?}",
        extracted.code.len(),
        extracted.reduced.msg_lens()
    );
    println!(
        "pinned message coordinates per receiver: {:?}",
        extracted.pinned
    );
    for r in 0..extracted.code.encode_matrix().rows() {
        println!("  encoder row: {:?}", extracted.code.encode_matrix().row(r));
    }
    Ok(())
}
