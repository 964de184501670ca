//! Self-delimiting bit encoding of machines and `<N, x, 1^t>` instances.
//!
//! Naturals are unary, `U(n) = 1^n 0`. A machine is
//! `U(states) U(|accept|) U(a_1)..U(a_k) U(entries) entry*` with accept
//! indices strictly increasing and each entry
//! `U(state) U(symbol) U(next) U(write) U(move)`, entries sorted by
//! `(state, symbol)` and then by branch index. An input bit `b` is the pair
//! `1b`, and the input ends with a single `0`. An instance is
//! `E(N) E(x) 1^t`; parsing is strictly left to right with no length fields,
//! so the pad is the unambiguous suffix.

use std::convert::Infallible;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{Machine, Move, Symbol, Transition};

/// A string over `{0, 1}`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a bit string: unexpected character {0:?}")]
pub struct BitStringParseError(pub char);

impl FromStr for BitString {
    type Err = BitStringParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitStringParseError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed encoding at bit {position}: {reason}")]
pub struct MalformedEncoding {
    pub position: usize,
    pub reason: &'static str,
}

/// Failure while decoding from a [`BitSource`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeFailure<E> {
    Malformed(MalformedEncoding),
    Source(E),
}

impl<E> From<MalformedEncoding> for DecodeFailure<E> {
    fn from(m: MalformedEncoding) -> Self {
        DecodeFailure::Malformed(m)
    }
}

impl DecodeFailure<Infallible> {
    fn into_malformed(self) -> MalformedEncoding {
        match self {
            DecodeFailure::Malformed(m) => m,
            DecodeFailure::Source(never) => match never {},
        }
    }
}

/// A left-to-right stream of bits. `Ok(None)` marks the end of input.
pub trait BitSource {
    type Error;

    fn next_bit(&mut self) -> Result<Option<bool>, Self::Error>;

    /// Number of bits consumed so far.
    fn position(&self) -> usize;
}

/// A [`BitSource`] over an in-memory slice.
pub struct SliceSource<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> SliceSource<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        SliceSource { bits, pos: 0 }
    }

    pub fn remaining(&self) -> &'a [bool] {
        &self.bits[self.pos..]
    }
}

impl BitSource for SliceSource<'_> {
    type Error = Infallible;

    fn next_bit(&mut self) -> Result<Option<bool>, Infallible> {
        let bit = self.bits.get(self.pos).copied();
        if bit.is_some() {
            self.pos += 1;
        }
        Ok(bit)
    }

    fn position(&self) -> usize {
        self.pos
    }
}

fn malformed<E>(position: usize, reason: &'static str) -> DecodeFailure<E> {
    DecodeFailure::Malformed(MalformedEncoding { position, reason })
}

pub fn push_unary(out: &mut Vec<bool>, n: usize) {
    out.extend(std::iter::repeat(true).take(n));
    out.push(false);
}

pub fn read_unary<S: BitSource>(src: &mut S) -> Result<usize, DecodeFailure<S::Error>> {
    let mut n = 0;
    loop {
        match src.next_bit().map_err(DecodeFailure::Source)? {
            Some(true) => n += 1,
            Some(false) => return Ok(n),
            None => return Err(malformed(src.position(), "truncated unary numeral")),
        }
    }
}

fn encode_machine_into(m: &Machine, out: &mut Vec<bool>) {
    push_unary(out, m.num_states());
    push_unary(out, m.accept_states().len());
    for &a in m.accept_states() {
        push_unary(out, a);
    }
    push_unary(out, m.num_entries());
    for (state, sym, tr) in m.entries() {
        push_unary(out, state);
        push_unary(out, sym.code());
        push_unary(out, tr.next);
        push_unary(out, tr.write.code());
        push_unary(out, tr.dir.code());
    }
}

fn encode_input_into(x: &BitString, out: &mut Vec<bool>) {
    for b in x.iter() {
        out.push(true);
        out.push(b);
    }
    out.push(false);
}

pub fn encode_machine(m: &Machine) -> BitString {
    let mut out = Vec::new();
    encode_machine_into(m, &mut out);
    BitString(out)
}

pub fn encode_input(x: &BitString) -> BitString {
    let mut out = Vec::with_capacity(2 * x.len() + 1);
    encode_input_into(x, &mut out);
    BitString(out)
}

/// `E(m) E(x)`: everything in an instance before the unary pad.
pub fn encode_pair(m: &Machine, x: &BitString) -> BitString {
    let mut out = Vec::new();
    encode_machine_into(m, &mut out);
    encode_input_into(x, &mut out);
    BitString(out)
}

pub fn encode_instance(m: &Machine, x: &BitString, t: u64) -> BitString {
    let mut out = encode_pair(m, x).0;
    out.extend(std::iter::repeat(true).take(t as usize));
    BitString(out)
}

/// Streams a machine off `src`, rejecting every non-canonical layout.
pub fn read_machine<S: BitSource>(src: &mut S) -> Result<Machine, DecodeFailure<S::Error>> {
    let num_states = read_unary(src)?;
    if num_states == 0 {
        return Err(malformed(src.position(), "machine with zero states"));
    }
    let num_accept = read_unary(src)?;
    if num_accept > num_states {
        return Err(malformed(src.position(), "more accept states than states"));
    }
    let mut accept = Vec::with_capacity(num_accept);
    for _ in 0..num_accept {
        let a = read_unary(src)?;
        if a >= num_states {
            return Err(malformed(src.position(), "accept state out of range"));
        }
        if accept.last().is_some_and(|&prev| prev >= a) {
            return Err(malformed(src.position(), "accept states not strictly increasing"));
        }
        accept.push(a);
    }
    let num_entries = read_unary(src)?;
    let mut entries: Vec<(usize, Symbol, Transition)> = Vec::with_capacity(num_entries);
    for _ in 0..num_entries {
        let state = read_unary(src)?;
        let sym = read_unary(src)?;
        let next = read_unary(src)?;
        let write = read_unary(src)?;
        let dir = read_unary(src)?;
        let pos = src.position();
        if state >= num_states || next >= num_states {
            return Err(malformed(pos, "transition state out of range"));
        }
        let (Some(sym), Some(write), Some(dir)) =
            (Symbol::from_code(sym), Symbol::from_code(write), Move::from_code(dir))
        else {
            return Err(malformed(pos, "symbol or move code out of range"));
        };
        let tr = Transition::new(next, write, dir);
        if let Some(&(ps, psym, _)) = entries.last() {
            if (ps, psym) > (state, sym) {
                return Err(malformed(pos, "transition entries out of canonical order"));
            }
        }
        if entries
            .iter()
            .rev()
            .take_while(|(s, y, _)| (*s, *y) == (state, sym))
            .any(|(_, _, prev)| *prev == tr)
        {
            return Err(malformed(pos, "duplicate transition entry"));
        }
        entries.push((state, sym, tr));
    }
    Ok(Machine::new(num_states, accept, entries).expect("validated while decoding"))
}

/// Streams an input string `x` off `src`.
pub fn read_input<S: BitSource>(src: &mut S) -> Result<BitString, DecodeFailure<S::Error>> {
    let mut bits = Vec::new();
    loop {
        match src.next_bit().map_err(DecodeFailure::Source)? {
            Some(false) => return Ok(BitString(bits)),
            Some(true) => match src.next_bit().map_err(DecodeFailure::Source)? {
                Some(b) => bits.push(b),
                None => return Err(malformed(src.position(), "truncated input bit")),
            },
            None => return Err(malformed(src.position(), "unterminated input")),
        }
    }
}

fn expect_end<S: BitSource>(src: &mut S) -> Result<(), DecodeFailure<S::Error>> {
    match src.next_bit().map_err(DecodeFailure::Source)? {
        None => Ok(()),
        Some(_) => Err(malformed(src.position() - 1, "trailing bits")),
    }
}

pub fn decode_machine(bits: &BitString) -> Result<Machine, MalformedEncoding> {
    let mut src = SliceSource::new(bits.bits());
    let m = read_machine(&mut src).map_err(DecodeFailure::into_malformed)?;
    expect_end(&mut src).map_err(DecodeFailure::into_malformed)?;
    Ok(m)
}

pub fn decode_input(bits: &BitString) -> Result<BitString, MalformedEncoding> {
    let mut src = SliceSource::new(bits.bits());
    let x = read_input(&mut src).map_err(DecodeFailure::into_malformed)?;
    expect_end(&mut src).map_err(DecodeFailure::into_malformed)?;
    Ok(x)
}

pub fn decode_instance(bits: &BitString) -> Result<Instance, MalformedEncoding> {
    let mut src = SliceSource::new(bits.bits());
    let machine = read_machine(&mut src).map_err(DecodeFailure::into_malformed)?;
    let input = read_input(&mut src).map_err(DecodeFailure::into_malformed)?;
    let pad_start = src.position();
    let pad = src.remaining();
    if let Some(i) = pad.iter().position(|&b| !b) {
        return Err(MalformedEncoding {
            position: pad_start + i,
            reason: "0 inside the unary pad",
        });
    }
    Ok(Instance {
        machine,
        input,
        bound: pad.len() as u64,
        encoded: bits.clone(),
    })
}

/// A bounded-halting instance `<N, x, 1^t>` together with its encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    machine: Machine,
    input: BitString,
    bound: u64,
    encoded: BitString,
}

impl Instance {
    pub fn new(machine: Machine, input: BitString, bound: u64) -> Instance {
        let encoded = encode_instance(&machine, &input, bound);
        Instance {
            machine,
            input,
            bound,
            encoded,
        }
    }

    pub fn machine(&self) -> &Machine {
        &self.machine
    }

    pub fn input(&self) -> &BitString {
        &self.input
    }

    /// The step bound `t`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn encoded(&self) -> &BitString {
        &self.encoded
    }

    /// Length of `E(N) E(x)`, i.e. the offset where the pad starts.
    pub fn prefix_len(&self) -> usize {
        self.encoded.len() - self.bound as usize
    }

    pub fn with_bound(&self, bound: u64) -> Instance {
        Instance::new(self.machine.clone(), self.input.clone(), bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::samples::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn accept_now_layout() {
        assert_eq!(encode_machine(&accept_now()), bits("101000"));
        assert_eq!(decode_machine(&bits("101000")).unwrap(), accept_now());
    }

    #[test]
    fn truncated_unary_is_malformed() {
        let err = decode_machine(&bits("11")).unwrap_err();
        assert_eq!(err.reason, "truncated unary numeral");
    }

    #[test]
    fn instance_layout() {
        let inst = Instance::new(accept_now(), BitString::default(), 3);
        assert_eq!(inst.encoded(), &bits("1010000111"));
        assert_eq!(inst.prefix_len(), 7);
        assert_eq!(decode_instance(&bits("1010000111")).unwrap(), inst);
    }

    #[test]
    fn zero_in_pad_is_malformed() {
        let err = decode_instance(&bits("1010000101")).unwrap_err();
        assert_eq!(err.reason, "0 inside the unary pad");
        assert_eq!(err.position, 8);
    }

    #[test]
    fn loop_right_length() {
        let expected = ["10", "0", "1110", "000010", "01001010", "0110011010", "0"].concat();
        let enc = encode_pair(&loop_right(), &BitString::default());
        assert_eq!(enc, bits(&expected));
        assert_eq!(enc.len(), 32);
    }

    #[test]
    fn input_encoding() {
        assert_eq!(encode_input(&bits("01")), bits("10110"));
        assert_eq!(decode_input(&bits("10110")).unwrap(), bits("01"));
        assert!(decode_input(&bits("101")).is_err());
        assert!(decode_input(&bits("1")).is_err());
        assert!(decode_input(&bits("00")).is_err());
    }

    #[test]
    fn non_canonical_machines_rejected() {
        // two states, accept list {1, 0} (not increasing)
        assert!(decode_machine(&bits("1101101000")).is_err());
        // zero states
        assert!(decode_machine(&bits("0000")).is_err());
        // symbol code 3
        assert!(decode_machine(&bits("1001001110000")).is_err());
    }

    #[test]
    fn bitstring_text() {
        assert_eq!(bits(" 0110\n").to_string(), "0110");
        assert!("012".parse::<BitString>().is_err());
    }
}
