//! Two receivers that each hold the other's message: one XOR symbol serves
//! both, and a single common key symbol makes it perfectly secure.
//!
//! Run with: cargo run --release --example xor_broadcast

use secidx::conventional::{min_rank, MinRankOutcome};
use secidx::gotp::{construct_gotp, gotp_feasible, Feasibility};
use secidx::problem::{Instance, KeyProfile};
use secidx::secure::secrecy_report;
use secidx::{DEFAULT_SEARCH_CAP, DEFAULT_SECURE_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let instance = Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#)?;
    println!("receiver 1 wants M_1 and knows M_2; receiver 2 wants M_2 and knows M_1\n");

    // conventional optimum: one symbol, witness [1 1]
    let MinRankOutcome::Found {
        l_star,
        witness,
        nodes,
    } = min_rank(&instance, 2, DEFAULT_SEARCH_CAP)?
    else {
        unreachable!("the identity code always fits");
    };
    println!("min-rank search: l* = {l_star} ({nodes} nodes)");
    println!("witness encoder row: {:?}", witness.encode_matrix().row(0));

    // one key symbol suffices for perfect secrecy on top of it
    let keys = KeyProfile::new(1, vec![0, 0], 0);
    let Feasibility::Feasible { conv_len } = gotp_feasible(&instance, &keys, DEFAULT_SEARCH_CAP)?
    else {
        unreachable!("l_k = 1 covers the one-symbol inner code");
    };
    let code = construct_gotp(&instance, &keys, &witness, DEFAULT_SECURE_CAP)?;
    println!(
        "\nsecure code: C = M_1 + M_2 + K, inner length {conv_len}, public length {}",
        code.code_len()
    );
    println!("rate vector (r_1, r_2, r_k, r_k1, r_k2) = {}", code.rate()?);

    let report = secrecy_report(&code, DEFAULT_SECURE_CAP)?;
    println!("\nfull report over all 8 joint inputs:");
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
