//! Bit-index helpers for signature entries.
//!
//! A signature index for arity `n` is a `usize` whose bit for position `p`
//! (1-based, position 1 first) is the *most* significant of the low `n`
//! bits. Bitstrings print left to right starting at position 1.

/// Bit mask selecting position `pos` (1-based) of an arity-`n` index.
pub fn pos_mask(pos: usize, arity: usize) -> usize {
    debug_assert!(pos >= 1 && pos <= arity);
    1 << (arity - pos)
}

pub fn get_bit(index: usize, pos: usize, arity: usize) -> bool {
    index & pos_mask(pos, arity) != 0
}

pub fn flip_bit(index: usize, pos: usize, arity: usize) -> usize {
    index ^ pos_mask(pos, arity)
}

/// Inserts `bit` at position `pos`, shifting later positions down; the
/// result indexes arity `n + 1` where `index` indexed arity `n`.
pub fn insert_bit(index: usize, pos: usize, bit: bool, arity: usize) -> usize {
    debug_assert!(pos >= 1 && pos <= arity + 1);
    let low_len = arity + 1 - pos;
    let low_mask = (1usize << low_len) - 1;
    let high = (index >> low_len) << (low_len + 1);
    let low = index & low_mask;
    high | ((bit as usize) << low_len) | low
}

/// Removes the bit at position `pos` of an arity-`n` index.
pub fn remove_bit(index: usize, pos: usize, arity: usize) -> usize {
    debug_assert!(pos >= 1 && pos <= arity);
    let low_len = arity - pos;
    let low_mask = (1usize << low_len) - 1;
    ((index >> (low_len + 1)) << low_len) | (index & low_mask)
}

/// Reverses the low `n` bits, mapping position `p` to position `n + 1 - p`.
pub fn reverse(index: usize, arity: usize) -> usize {
    let mut out = 0usize;
    for k in 0..arity {
        if index & (1 << k) != 0 {
            out |= 1 << (arity - 1 - k);
        }
    }
    out
}

/// Block `j` (1-based) of an index split into `blocks` blocks of
/// `block_size` bits, block 1 most significant.
pub fn block(index: usize, j: usize, block_size: usize, blocks: usize) -> usize {
    debug_assert!(j >= 1 && j <= blocks);
    (index >> ((blocks - j) * block_size)) & ((1 << block_size) - 1)
}

/// Rebuilds an index from its blocks (block 1 first).
pub fn assemble(parts: &[usize], block_size: usize) -> usize {
    parts
        .iter()
        .fold(0usize, |acc, &p| (acc << block_size) | p)
}

/// Replaces block `j` of `index` with `value`.
pub fn with_block(index: usize, j: usize, value: usize, block_size: usize, blocks: usize) -> usize {
    let shift = (blocks - j) * block_size;
    let mask = ((1usize << block_size) - 1) << shift;
    (index & !mask) | (value << shift)
}

/// Parity bit of the Hamming weight: 0 for even weight, 1 for odd.
pub fn parity(index: usize) -> usize {
    (index.count_ones() & 1) as usize
}

/// Renders the low `n` bits as a bitstring, position 1 leftmost.
pub fn to_bitstring(index: usize, arity: usize) -> String {
    (1..=arity)
        .map(|p| if get_bit(index, p, arity) { '1' } else { '0' })
        .collect()
}

/// Parses a bitstring (position 1 leftmost).
pub fn from_bitstring(text: &str) -> Option<(usize, usize)> {
    let mut index = 0usize;
    for ch in text.chars() {
        match ch {
            '0' => index <<= 1,
            '1' => index = (index << 1) | 1,
            _ => return None,
        }
    }
    if text.is_empty() {
        return None;
    }
    Some((index, text.len()))
}
