//! The one-receiver cipher as an index coding problem: a single message, no
//! side information, one shared key. A perfectly secure zero-error code
//! exists exactly when the key is at least as long as the message, and the
//! code that achieves it is the one-time pad.
//!
//! Run with: cargo run --release --example shannon_pad

use secidx::conventional::find_linear_code;
use secidx::gotp::{construct_gotp, gotp_feasible, Feasibility};
use secidx::problem::{Instance, KeyProfile};
use secidx::secure::{verify_decoding, verify_perfect_secrecy, SecureCode};
use secidx::DEFAULT_SECURE_CAP;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cap = DEFAULT_SECURE_CAP;
    let msg_len = 3;
    let instance = Instance::parse(&format!(
        r#"{{"t":1,"p":2,"side_info":[[]],"msg_len":[{msg_len}]}}"#
    ))?;
    println!("single receiver, {msg_len}-bit message, no side information\n");

    // feasibility across key lengths: the boundary is l_k = message length
    for l_k in 0..=4usize {
        let keys = KeyProfile::new(l_k, vec![0], 0);
        match gotp_feasible(&instance, &keys, cap)? {
            Feasibility::Feasible { conv_len } => {
                println!("l_k = {l_k}: feasible (inner code length {conv_len})")
            }
            Feasibility::Infeasible { reason } => println!("l_k = {l_k}: infeasible - {reason}"),
        }
    }

    // build the pad at the boundary and verify it exhaustively
    let keys = KeyProfile::new(msg_len, vec![0], 0);
    let conv = find_linear_code(&instance, msg_len, cap)?.expect("identity code exists");
    let code = construct_gotp(&instance, &keys, &conv, cap)?;
    println!(
        "\nconstructed C = M xor K with public length {}",
        code.code_len()
    );

    let secrecy = verify_perfect_secrecy(&code, cap)?;
    let decoding = verify_decoding(&code, cap)?;
    println!(
        "perfect secrecy: {}",
        if secrecy.passed() { "pass" } else { "FAIL" }
    );
    println!(
        "zero-error decoding: {}",
        if decoding.passed() { "pass" } else { "FAIL" }
    );
    println!("rate vector (r_1, r_k, r_k1) = {}", code.rate()?);

    if let SecureCode::Linear(lin) = &code {
        println!("\ngeneration matrix [K | M]:");
        let pi = lin.matrix().pi();
        for r in 0..pi.rows() {
            println!("  {:?}", pi.row(r));
        }
    }
    Ok(())
}
