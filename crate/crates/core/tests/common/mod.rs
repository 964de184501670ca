//! Brute-force reference simulator used as a test oracle. It shares no
//! execution code with the library: it reads the machine's entries once and
//! walks every branch sequence on its own tape representation.

#![allow(dead_code)]

use haltlab::codec::BitString;
use haltlab::machine::{Machine, Move};

const BLANK: u8 = 2;

pub struct Oracle {
    accept: Vec<bool>,
    /// `table[state][symbol]` = branches `(next, write, right?)` in order.
    table: Vec<[Vec<(usize, u8, bool)>; 3]>,
}

#[derive(Clone)]
struct Node {
    state: usize,
    head: usize,
    tape: Vec<u8>,
}

impl Node {
    fn read(&self) -> u8 {
        self.tape.get(self.head).copied().unwrap_or(BLANK)
    }

    fn step(&self, (next, write, right): (usize, u8, bool)) -> Node {
        let mut tape = self.tape.clone();
        if self.head >= tape.len() {
            tape.resize(self.head + 1, BLANK);
        }
        tape[self.head] = write;
        let head = if right { self.head + 1 } else { self.head.saturating_sub(1) };
        Node { state: next, head, tape }
    }
}

impl Oracle {
    pub fn new(m: &Machine) -> Self {
        let mut table = vec![[Vec::new(), Vec::new(), Vec::new()]; m.num_states()];
        for (q, s, tr) in m.entries() {
            table[q][s.code()].push((tr.next, tr.write.code() as u8, tr.dir == Move::Right));
        }
        Oracle {
            accept: (0..m.num_states()).map(|q| m.accept_states().contains(&q)).collect(),
            table,
        }
    }

    fn start(x: &BitString) -> Node {
        Node {
            state: 0,
            head: 0,
            tape: x.iter().map(u8::from).collect(),
        }
    }

    /// Visits every branch sequence of length at most `depth`, calling `f`
    /// on each accepting computation (a sequence stops at its first
    /// accepting configuration).
    pub fn for_each_accepting(&self, x: &BitString, depth: usize, f: &mut impl FnMut(&[usize])) {
        fn go(o: &Oracle, n: &Node, depth: usize, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
            if o.accept[n.state] {
                f(path);
                return;
            }
            if path.len() == depth {
                return;
            }
            for (c, &tr) in o.table[n.state][n.read() as usize].iter().enumerate() {
                path.push(c);
                go(o, &n.step(tr), depth, path, f);
                path.pop();
            }
        }
        go(self, &Self::start(x), depth, &mut Vec::new(), f);
    }

    /// Length of the shortest accepting computation of length <= `depth`.
    pub fn min_accepting_len(&self, x: &BitString, depth: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        self.for_each_accepting(x, depth, &mut |p| {
            best = Some(best.map_or(p.len(), |b| b.min(p.len())));
        });
        best
    }

    pub fn accepting_paths(&self, x: &BitString, depth: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each_accepting(x, depth, &mut |p| out.push(p.to_vec()));
        out
    }

    /// True when `path` is an accepting computation on `x`.
    pub fn is_accepting_path(&self, x: &BitString, path: &[usize]) -> bool {
        let mut n = Self::start(x);
        for &c in path {
            if self.accept[n.state] {
                return false;
            }
            match self.table[n.state][n.read() as usize].get(c) {
                Some(&tr) => n = n.step(tr),
                None => return false,
            }
        }
        self.accept[n.state]
    }

    /// Runs a deterministic machine for at most `t` steps; true if it is in
    /// an accepting state at some point.
    pub fn deterministic_accepts(&self, x: &BitString, t: usize) -> bool {
        let mut n = Self::start(x);
        for _ in 0..=t {
            if self.accept[n.state] {
                return true;
            }
            match self.table[n.state][n.read() as usize].first() {
                Some(&tr) => n = n.step(tr),
                None => return false,
            }
        }
        false
    }
}
