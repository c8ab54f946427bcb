//! Cone membership: a secure rate vector is achievable up to scaling
//! exactly when its normalized message rates `[r_i - r_ki]+ / r_k` land in
//! the conventional rate region. The check searches for witness codes at
//! denominator-bounded block lengths; rates above one per receiver are
//! outside every region.
//!
//! Run with: cargo run --release --example cone_membership

use secidx::cli::{cone_membership, ConeVerdict};
use secidx::problem::{Instance, RateVector};
use secidx::DEFAULT_SEARCH_CAP;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let xor = Instance::parse(r#"{"t":2,"p":2,"side_info":[[2],[1]],"msg_len":[1,1]}"#)?;
    let single = Instance::parse(r#"{"t":1,"p":2,"side_info":[[]],"msg_len":[1]}"#)?;

    let cases: Vec<(&str, &Instance, &str)> = vec![
        ("pad at the boundary", &single, "1,1,0"),
        ("message twice the key", &single, "2,1,0"),
        ("private key absorbs the message", &single, "1,0,1"),
        ("no keys at all", &single, "1,0,0"),
        ("padded XOR code", &xor, "1,1,1,0,0"),
        ("XOR with undersized key rate", &xor, "1,1,1/2,0,0"),
        ("per-message pads", &xor, "1/2,1/2,0,1/2,1/2"),
    ];

    for (name, instance, rates) in cases {
        let rate = RateVector::parse(rates, instance.receivers())?;
        let (verdict, ratios) = cone_membership(instance, &rate, 6, DEFAULT_SEARCH_CAP)?;
        let verdict = match verdict {
            ConeVerdict::InCone { witness_len } => {
                format!("in-cone (witness code of length {witness_len})")
            }
            ConeVerdict::OutOfCone => "out-of-cone".to_string(),
            ConeVerdict::Undecided => "undecided at the search cap".to_string(),
        };
        println!("{name}: rates ({rates}) -> normalized {ratios:?} -> {verdict}");
    }
    Ok(())
}
