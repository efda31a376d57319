//! Shared input builders for the benchmark suite.

/// `a^n b^n c^n d^n` as a token vector, `blocks` tokens per letter.
pub fn counting_input(blocks: usize) -> Vec<&'static str> {
    let mut tokens = Vec::with_capacity(blocks * 4);
    for letter in ["a", "b", "c", "d"] {
        tokens.extend(std::iter::repeat_n(letter, blocks));
    }
    tokens
}
