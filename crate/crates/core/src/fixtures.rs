//! Bundled elections: the toy election, the counterexample pairs for the
//! failed criteria, and two real margin matrices (Oakland 2022 school board
//! District 4, Minneapolis 2021 Ward 2).

use crate::profile::{parse_ballot_file, parse_margin_csv, MarginMatrix, Profile};

pub const TOY: &str = include_str!("../fixtures/toy.bal");
pub const IIA2: &str = include_str!("../fixtures/iia2.bal");
pub const MONO1: &str = include_str!("../fixtures/mono1.bal");
pub const MONO2: &str = include_str!("../fixtures/mono2.bal");
pub const LNH1: &str = include_str!("../fixtures/lnh1.bal");
pub const LNH2: &str = include_str!("../fixtures/lnh2.bal");
pub const NOSHOW1: &str = include_str!("../fixtures/noshow1.bal");
pub const NOSHOW2: &str = include_str!("../fixtures/noshow2.bal");
pub const CLONE1: &str = include_str!("../fixtures/clone1.bal");
pub const CLONE2: &str = include_str!("../fixtures/clone2.bal");
pub const OAKLAND: &str = include_str!("../fixtures/oakland.csv");
pub const MINNEAPOLIS: &str = include_str!("../fixtures/minneapolis.csv");

fn ballots(text: &str) -> Profile {
    parse_ballot_file(text).expect("bundled fixture parses")
}

pub fn toy() -> Profile {
    ballots(TOY)
}

pub fn iia2() -> Profile {
    ballots(IIA2)
}

pub fn mono1() -> Profile {
    ballots(MONO1)
}

pub fn mono2() -> Profile {
    ballots(MONO2)
}

pub fn lnh1() -> Profile {
    ballots(LNH1)
}

pub fn lnh2() -> Profile {
    ballots(LNH2)
}

pub fn noshow1() -> Profile {
    ballots(NOSHOW1)
}

pub fn noshow2() -> Profile {
    ballots(NOSHOW2)
}

pub fn clone1() -> Profile {
    ballots(CLONE1)
}

pub fn clone2() -> Profile {
    ballots(CLONE2)
}

pub fn oakland() -> MarginMatrix {
    parse_margin_csv(OAKLAND).expect("bundled fixture parses")
}

pub fn minneapolis() -> MarginMatrix {
    parse_margin_csv(MINNEAPOLIS).expect("bundled fixture parses")
}

/// All bundled ballot fixtures by name.
pub fn ballot_fixtures() -> Vec<(&'static str, Profile)> {
    vec![
        ("toy", toy()),
        ("iia2", iia2()),
        ("mono1", mono1()),
        ("mono2", mono2()),
        ("lnh1", lnh1()),
        ("lnh2", lnh2()),
        ("noshow1", noshow1()),
        ("noshow2", noshow2()),
        ("clone1", clone1()),
        ("clone2", clone2()),
    ]
}
