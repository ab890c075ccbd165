//! Raw choice matrices of the two early pilot sessions, digits exactly as
//! printed. Which option a `1` stands for was never stated, so the
//! matrices carry [`Coding::Unknown`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::switches::{ChoiceMatrix, Coding};
use super::StatsError;

pub const SESSION1_STAGE1: [&str; 14] = [
    "1110001111", "1111111111", "1101111101", "1010110101", "1101111011", "1011000000", "0001010100",
    "1111100010", "0000000000", "0000000000", "0010000111", "1111111111", "1100101010", "0000000011",
];

pub const SESSION1_STAGE2: [&str; 14] = [
    "0111100001", "0000011111", "1111111111", "0100101001", "0111101100", "1011110000", "0101011111",
    "0100001001", "0000011000", "1100000000", "0000011000", "1111111111", "0011010011", "1111111100",
];

pub const SESSION2_STAGE1: [&str; 14] = [
    "1111111110", "0101111101", "1111111111", "0010101011", "1111111111", "0111111111", "0111100110",
    "1111111111", "1110000110", "0111111110", "0111111111", "0001100000", "0000001111", "1111100000",
];

pub const SESSION2_STAGE2: [&str; 14] = [
    "0000000000", "1111101010", "1000000000", "0010010011", "0011101111", "1101101000", "0110001100",
    "0000011111", "0101010101", "0000100110", "1100111101", "0010000000", "0000001111", "0000011111",
];

/// Subject numbering: session 1 holds subjects 1–14, session 2 holds 15–28.
pub const SESSION1_FIRST_SUBJECT: usize = 1;
pub const SESSION2_FIRST_SUBJECT: usize = 15;

/// Parses digit strings such as `"0110"` into a matrix of unknown coding.
pub fn matrix_from_digits(first_subject: usize, rows: &[&str]) -> Result<ChoiceMatrix, StatsError> {
    let ids: Vec<String> = (0..rows.len()).map(|i| format!("{}", first_subject + i)).collect();
    let parsed = rows
        .iter()
        .map(|r| {
            r.chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    _ => Err(StatsError::NotBinary),
                })
                .collect::<Result<Vec<u8>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    ChoiceMatrix::new(ids, parsed, Coding::Unknown)
}

/// One pilot session: both stages, rows aligned by subject.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSession {
    pub name: String,
    pub stage1: ChoiceMatrix,
    pub stage2: ChoiceMatrix,
}

/// The two embedded sessions.
pub fn embedded_sessions() -> Vec<PilotSession> {
    let build = |name: &str, first, s1: &[&str], s2: &[&str]| PilotSession {
        name: name.into(),
        stage1: matrix_from_digits(first, s1).expect("embedded fixture is valid"),
        stage2: matrix_from_digits(first, s2).expect("embedded fixture is valid"),
    };
    alloc::vec![
        build("session-1", SESSION1_FIRST_SUBJECT, &SESSION1_STAGE1, &SESSION1_STAGE2),
        build("session-2", SESSION2_FIRST_SUBJECT, &SESSION2_STAGE1, &SESSION2_STAGE2),
    ]
}
