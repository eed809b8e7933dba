#![allow(dead_code)]

pub mod golden;
pub mod oracle;
pub mod reference;
