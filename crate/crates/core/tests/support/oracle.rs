//! Exact expected payoffs under threshold updating, by brute force.
//!
//! A threshold-mode run is a deterministic function of its fair coin flips
//! (the initial windows, or every state of a memoryless agent). Enumerating
//! all equally likely flip patterns gives the exact expectation. This file
//! re-derives the generation rules from scratch and shares no code with the
//! simulator.

#![allow(dead_code)]

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Modular,
    AiToH { c: usize },
    HToAi { c: usize, hallucinate: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub kind: Kind,
    pub n_h: usize,
    pub k_h: usize,
    pub n_ai: usize,
    pub k_ai: usize,
    pub ai_coin: bool,
    pub h_tie_one: bool,
    pub ai_tie_one: bool,
}

fn decide(window: &[u8], linear: bool, tie_one: bool) -> u8 {
    let (mut num, mut den) = (0u64, 0u64);
    for (i, &b) in window.iter().enumerate() {
        let w = if linear { i as u64 + 1 } else { 1 };
        num += w * b as u64;
        den += w;
    }
    match (2 * num).cmp(&den) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Equal => tie_one as u8,
        std::cmp::Ordering::Less => 0,
    }
}

fn bits_of(pattern: u64, count: usize) -> Vec<u8> {
    (0..count).map(|i| ((pattern >> i) & 1) as u8).collect()
}

/// How many fair flips a self-seeded agent consumes.
fn flips(n: usize, k: usize, coin: bool) -> usize {
    if k == 0 || coin {
        n
    } else {
        k
    }
}

fn self_seeded(
    n: usize,
    k: usize,
    coin: bool,
    linear: bool,
    tie_one: bool,
    flips_in: &[u8],
) -> Vec<u8> {
    let mut seq = flips_in.to_vec();
    if !(k == 0 || coin) {
        while seq.len() < n {
            let s = decide(&seq[seq.len() - k..], linear, tie_one);
            seq.push(s);
        }
    }
    seq
}

/// Extends `base` with `len` states; state i (1-based) reads tape
/// positions i..i+c-1 while the base lasts, then the c latest states.
/// Returns the deterministic states plus the number of coin states.
fn follow(
    base: &[u8],
    c: usize,
    len: usize,
    linear: bool,
    tie_one: bool,
    coin_tail: bool,
) -> (Vec<u8>, usize) {
    let mut tape = base.to_vec();
    let mut out = Vec::new();
    let mut coins = 0;
    for i in 1..=len {
        if i > base.len() && coin_tail {
            coins += 1;
            continue;
        }
        let window: Vec<u8> = if i <= base.len() {
            tape[i - 1..i - 1 + c].to_vec()
        } else {
            out[out.len() - c..].to_vec()
        };
        let s = decide(&window, linear, tie_one);
        tape.push(s);
        out.push(s);
    }
    (out, coins)
}

fn ones(v: &[u8]) -> f64 {
    v.iter().map(|&b| b as f64).sum()
}

/// Mean payoff of a self-seeded agent over all flip patterns.
fn mean_self(n: usize, k: usize, coin: bool, linear: bool, tie_one: bool) -> f64 {
    let f = flips(n, k, coin);
    let total: f64 = (0..1u64 << f)
        .map(|p| ones(&self_seeded(n, k, coin, linear, tie_one, &bits_of(p, f))))
        .sum();
    total / (1u64 << f) as f64 / n as f64
}

/// Exact expected `(po_h, po_ai, apo)`.
pub fn expected(case: &Case) -> (f64, f64, f64) {
    let Case {
        n_h,
        k_h,
        n_ai,
        k_ai,
        ai_coin,
        h_tie_one,
        ai_tie_one,
        ..
    } = *case;
    let (po_h, po_ai) = match case.kind {
        Kind::Modular => (
            mean_self(n_h, k_h, false, true, h_tie_one),
            mean_self(n_ai, k_ai, ai_coin, false, ai_tie_one),
        ),
        Kind::AiToH { c } => {
            let f = flips(n_ai, k_ai, ai_coin);
            let (mut sh, mut sa) = (0.0, 0.0);
            for p in 0..1u64 << f {
                let ai = self_seeded(n_ai, k_ai, ai_coin, false, ai_tie_one, &bits_of(p, f));
                let (h, _) = follow(&ai[..c], c, n_h, true, h_tie_one, false);
                sh += ones(&h);
                sa += ones(&ai);
            }
            let m = (1u64 << f) as f64;
            (sh / m / n_h as f64, sa / m / n_ai as f64)
        }
        Kind::HToAi { c, hallucinate } => {
            let f = flips(n_h, k_h, false);
            let (mut sh, mut sa) = (0.0, 0.0);
            for p in 0..1u64 << f {
                let h = self_seeded(n_h, k_h, false, true, h_tie_one, &bits_of(p, f));
                let (ai, coins) = follow(&h, c, n_ai, false, ai_tie_one, hallucinate);
                sh += ones(&h);
                sa += ones(&ai) + 0.5 * coins as f64;
            }
            let m = (1u64 << f) as f64;
            (sh / m / n_h as f64, sa / m / n_ai as f64)
        }
    };
    (po_h, po_ai, 0.5 * (po_h + po_ai))
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn hand_worked_rows() {
        assert_eq!(decide(&[0, 0, 0, 1, 1], true, false), 1); // 9/15
        assert_eq!(decide(&[0, 0, 0, 1, 1], false, true), 0); // 2/5
        assert_eq!(decide(&[0, 1, 1, 0], false, false), 0);
        assert_eq!(decide(&[0, 1, 1, 0], false, true), 1);
        let (ai, coins) = follow(&[1, 0, 1, 1, 0, 1], 4, 8, false, false, false);
        assert_eq!((ai, coins), (vec![1, 0, 1, 1, 0, 1, 1, 1], 0));
        let (ai, coins) = follow(&[1, 0, 1, 1, 0, 1], 4, 8, false, false, true);
        assert_eq!((ai, coins), (vec![1, 0, 1, 1, 0, 1], 2));
    }

    #[test]
    fn memoryless_agent_is_fair() {
        assert_eq!(mean_self(6, 0, false, true, false), 0.5);
        assert_eq!(mean_self(6, 3, true, false, false), 0.5);
    }
}
