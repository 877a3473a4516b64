//! Small reference models used throughout the tests and documentation.

use crate::automaton::AnnotatedModel;
use crate::io::parse_model;

fn load(text: &str) -> AnnotatedModel {
    parse_model(text).expect("bundled model parses")
}

/// Two states; `a` loops, `b` leaves.
pub fn s1() -> AnnotatedModel {
    load(include_str!("../models/s1.json"))
}

/// Three states with an unobservable self-loop and a nondeterministic `b`.
pub fn s2() -> AnnotatedModel {
    load(include_str!("../models/s2.json"))
}

/// Fault `f` after `ab` on one branch only.
pub fn s3() -> AnnotatedModel {
    load(include_str!("../models/s3.json"))
}

/// Two initial states, one of them secret.
pub fn s4() -> AnnotatedModel {
    load(include_str!("../models/s4.json"))
}

/// A secret reachable only through an unobservable move.
pub fn s5() -> AnnotatedModel {
    load(include_str!("../models/s5.json"))
}

/// Fully unobservable model where the faulty branch keeps running.
pub fn s6() -> AnnotatedModel {
    load(include_str!("../models/s6.json"))
}

/// As [`s6`] but the faulty branch deadlocks.
pub fn s7() -> AnnotatedModel {
    load(include_str!("../models/s7.json"))
}

/// All bundled models with their file stems.
pub fn all() -> Vec<(&'static str, AnnotatedModel)> {
    vec![
        ("s1", s1()),
        ("s2", s2()),
        ("s3", s3()),
        ("s4", s4()),
        ("s5", s5()),
        ("s6", s6()),
        ("s7", s7()),
    ]
}
