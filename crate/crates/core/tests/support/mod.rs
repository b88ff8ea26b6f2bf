#![allow(dead_code)]

pub mod adversarial;
pub mod bank;
pub mod fuzz;
pub mod golden;
pub mod remote;
pub mod roundtrip;
pub mod stub;
