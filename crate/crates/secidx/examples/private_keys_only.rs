//! With no common key, each receiver's private key must cover its own
//! message, and the public length cannot drop below the sum of the private
//! key lengths: exhaustive search over all deterministic table codes finds
//! no perfectly secure single-symbol code for two unit messages, while the
//! two-symbol per-message pad passes every check.
//!
//! Run with: cargo run --release --example private_keys_only

use secidx::conventional::find_linear_code;
use secidx::gotp::{construct_gotp, reduced_instance};
use secidx::problem::{Instance, KeyProfile};
use secidx::secure::{search_table_code, verify_decoding, verify_perfect_secrecy, SearchGoal};
use secidx::DEFAULT_SECURE_CAP;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cap = DEFAULT_SECURE_CAP;
    let instance = Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#)?;
    println!("two unit messages, crossed side information, no common key\n");

    // conventionally one XOR symbol suffices; with secrecy it cannot
    println!("searching all deterministic table codes of length 1:");
    for k1 in 0..=1usize {
        for k2 in 0..=1usize {
            let keys = KeyProfile::new(0, vec![k1, k2], 0);
            let found = search_table_code(&instance, &keys, 1, SearchGoal::PerfectlySecure, cap)?;
            println!(
                "  private keys ({k1},{k2}): {}",
                if found.is_some() {
                    "secure code found (unexpected!)"
                } else {
                    "no perfectly secure zero-error code"
                }
            );
        }
    }

    // the per-message pad needs l = l_k1 + l_k2 = 2 public symbols
    let keys = KeyProfile::new(0, vec![1, 1], 0);
    let reduced = reduced_instance(&instance, &keys)?;
    let conv = find_linear_code(&reduced, 0, cap)?.expect("empty inner code");
    let code = construct_gotp(&instance, &keys, &conv, cap)?;
    println!(
        "\nper-message pad: C = (M_1 + K_1, M_2 + K_2), public length {}",
        code.code_len()
    );
    println!(
        "perfect secrecy: {}",
        if verify_perfect_secrecy(&code, cap)?.passed() {
            "pass"
        } else {
            "FAIL"
        }
    );
    println!(
        "zero-error decoding: {}",
        if verify_decoding(&code, cap)?.passed() {
            "pass"
        } else {
            "FAIL"
        }
    );
    println!("rate vector = {}", code.rate()?);
    Ok(())
}
