//! Exact secrecy metrics side by side: a one-time pad (independent of the
//! message), a half-keyed code (partial leak), and a plain broadcast (full
//! leak). Total variation and error probability are exact rationals;
//! mutual information carries an explicit floating-point error bound.
//!
//! Run with: cargo run --release --example secrecy_metrics

use secidx::field::FieldMatrix;
use secidx::linreduce::{BlockLayout, CodeMatrix};
use secidx::problem::{ratio_string, Instance};
use secidx::secure::{
    error_probability, error_probability_mc, joint_of, mutual_information, total_variation,
    verify_perfect_secrecy, LinearSecureCode, SecureCode,
};
use secidx::DEFAULT_SECURE_CAP;

fn linear_code(instance: &Instance, l_k: usize, rows: &[Vec<u16>]) -> SecureCode {
    let layout = BlockLayout::new(
        l_k,
        vec![0; instance.receivers()],
        0,
        instance.msg_lens().to_vec(),
    );
    let pi = FieldMatrix::from_rows(rows, layout.total_cols(), 2).unwrap();
    let cm = CodeMatrix::new(pi, layout).unwrap();
    SecureCode::Linear(
        LinearSecureCode::new(instance.clone(), cm)
            .unwrap()
            .with_derived_decoders()
            .unwrap(),
    )
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cap = DEFAULT_SECURE_CAP;
    let instance = Instance::parse(r#"{"t":1,"p":2,"side_info":[[]],"msg_len":[2]}"#)?;

    // columns: K block | M block
    let codes = [
        (
            "one-time pad (C = M + K)",
            linear_code(&instance, 2, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]),
        ),
        (
            "half-keyed (C = (M_1(1) + K, M_1(2)))",
            linear_code(&instance, 1, &[vec![1, 1, 0], vec![0, 0, 1]]),
        ),
        (
            "plain broadcast (C = M)",
            linear_code(&instance, 0, &[vec![1, 0], vec![0, 1]]),
        ),
    ];

    for (name, code) in &codes {
        println!("{name}");
        let perfect = verify_perfect_secrecy(code, cap)?;
        println!(
            "  perfect secrecy: {}",
            if perfect.passed() { "pass" } else { "fail" }
        );
        let joint = joint_of(code, cap)?;
        println!(
            "  total variation: {}",
            ratio_string(&total_variation(&joint))
        );
        let (mi, err) = mutual_information(&joint);
        println!("  mutual information: {mi} bits (error bound {err:.3e})");
        let perr = error_probability(code, cap)?;
        let mc = error_probability_mc(code, 10_000, 7)?;
        println!(
            "  decoding error probability: {} exact, {mc} over 10000 samples\n",
            ratio_string(&perr)
        );
    }
    Ok(())
}
