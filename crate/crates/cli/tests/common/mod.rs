use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_moduli-strata");

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

pub fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exited normally")
}

/// Invocations with their expected exit status.
pub const GOLDEN: [(&[&str], i32); 12] = [
    (&["plan", "--fixed", "1", "--varying", "3", "--json"], 0),
    (&["gamma", "--g", "4", "--partition", "12|34", "--json"], 0),
    (&["plan", "--unitary", "2,3", "--elliptic", "1", "--require-feasible"], 0),
    (&["plan", "--unitary", "2,2", "--elliptic", "1", "--require-feasible"], 3),
    (&["plan", "--varying", "1,3"], 1),
    (&["verify", "L5.5", "--g-max", "6"], 0),
    (&["verify", "L3.3"], 2),
    (&["verify", "L9.9"], 1),
    (&["kodaira", "--genus", "5", "--require-feasible"], 3),
    (&["kodaira", "--genus", "4", "--require-feasible"], 0),
    (&["realize", "--varying", "2,3", "--g", "7", "--json"], 0),
    (&["frobnicate"], 1),
];
