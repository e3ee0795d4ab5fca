use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::TannerGraph;
use super::rng_for;
use crate::bch::ComponentCode;
use crate::error::{Error, Result};
use crate::word::Word;

/// What fills the receiving bit's own slot of the candidate decoding vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotRule {
    /// The channel value `r_i` (extrinsic decoder).
    ChannelValue,
    /// The bit's own incoming message; not extrinsic, kept for comparison.
    OwnMessage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transmission {
    AllZero,
    /// A uniformly random codeword of the whole graph code.
    RandomCodeword,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub max_iters: usize,
    pub transmission: Transmission,
    pub slot_rule: SlotRule,
    /// Keep per-position counts for every iteration.
    pub per_position: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            transmission: Transmission::AllZero,
            slot_rule: SlotRule::ChannelValue,
            per_position: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimVerdict {
    /// No erroneous message left.
    Success,
    /// Messages reached a fixed point with errors.
    Failure,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub message_errors: usize,
    pub bit_errors: usize,
    /// `(message_errors, bit_errors)` per bit position.
    pub per_position: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub p: f64,
    pub graph_seed: u64,
    pub noise_seed: u64,
    pub messages: usize,
    pub bits: usize,
    pub verdict: SimVerdict,
    pub iterations: Vec<IterationStats>,
}

impl SimTrace {
    /// Erroneous-message fraction after each iteration (index 0 is the channel).
    pub fn message_error_rates(&self) -> Vec<f64> {
        self.iterations
            .iter()
            .map(|s| s.message_errors as f64 / self.messages as f64)
            .collect()
    }

    /// CSV with columns `iteration,position,message_errors,bit_errors`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "position", "message_errors", "bit_errors"])?;
        for s in &self.iterations {
            if s.per_position.is_empty() {
                w.write_record([s.iteration.to_string(), "all".into(), s.message_errors.to_string(), s.bit_errors.to_string()])?;
            }
            for (i, (me, be)) in s.per_position.iter().enumerate() {
                w.write_record([s.iteration.to_string(), (i + 1).to_string(), me.to_string(), be.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Run parameters for a metadata file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetadata {
    pub nu: u32,
    pub t: usize,
    pub even_subcode: bool,
    pub n: usize,
    pub m: usize,
    pub coupled: bool,
    pub l: usize,
    pub w: usize,
    pub p: f64,
    pub graph_seed: u64,
    pub noise_seed: u64,
    pub options: SimOptions,
    pub verdict: SimVerdict,
    pub iterations: usize,
}

impl SimMetadata {
    pub fn new(code: &ComponentCode, graph: &TannerGraph, trace: &SimTrace, options: &SimOptions) -> Self {
        Self {
            nu: code.nu(),
            t: code.t(),
            even_subcode: code.is_even_subcode(),
            n: graph.n(),
            m: graph.m(),
            coupled: graph.is_coupled(),
            l: graph.profile().l(),
            w: graph.profile().w(),
            p: trace.p,
            graph_seed: trace.graph_seed,
            noise_seed: trace.noise_seed,
            options: *options,
            verdict: trace.verdict,
            iterations: trace.iterations.len().saturating_sub(1),
        }
    }
}

/// Message-passing state: one binary message per bit edge, `msg[2b+e]`
/// being the message from bit `b` to the constraint on its edge `e`.
#[derive(Debug, Clone)]
pub struct HddDecoder<'a> {
    graph: &'a TannerGraph,
    code: &'a ComponentCode,
    received: Vec<bool>,
    transmitted: Vec<bool>,
    msg: Vec<bool>,
    rule: SlotRule,
    iteration: usize,
}

impl<'a> HddDecoder<'a> {
    pub fn new(graph: &'a TannerGraph, code: &'a ComponentCode, transmitted: Vec<bool>, received: Vec<bool>, rule: SlotRule) -> Result<Self> {
        if code.n() != graph.n() {
            return Err(Error::config(format!("code length {} does not match graph n={}", code.n(), graph.n())));
        }
        if transmitted.len() != graph.bits() || received.len() != graph.bits() {
            return Err(Error::config("transmitted/received length must equal the number of bits"));
        }
        let msg = received.iter().flat_map(|&r| [r, r]).collect();
        Ok(Self {
            graph,
            code,
            received,
            transmitted,
            msg,
            rule,
            iteration: 0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn messages(&self) -> &[bool] {
        &self.msg
    }

    /// Positions of erroneous messages.
    pub fn message_error_mask(&self) -> Vec<bool> {
        self.msg
            .iter()
            .enumerate()
            .map(|(e, &v)| v != self.transmitted[e / 2])
            .collect()
    }

    /// Bit decision: majority of the channel value and both incoming decisions.
    pub fn bit_estimates(&self) -> Vec<bool> {
        self.received
            .iter()
            .enumerate()
            .map(|(b, &r)| (r as u8 + self.msg[2 * b] as u8 + self.msg[2 * b + 1] as u8) >= 2)
            .collect()
    }

    pub fn stats(&self, per_position: bool) -> IterationStats {
        let g = self.graph;
        let mut pos = if per_position { vec![(0usize, 0usize); g.bit_positions()] } else { Vec::new() };
        let (mut me, mut be) = (0, 0);
        let est = self.bit_estimates();
        for b in 0..g.bits() {
            let tx = self.transmitted[b];
            let e = (self.msg[2 * b] != tx) as usize + (self.msg[2 * b + 1] != tx) as usize;
            let bit = (est[b] != tx) as usize;
            me += e;
            be += bit;
            if per_position {
                let slot = &mut pos[g.bit_position(b)];
                slot.0 += e;
                slot.1 += bit;
            }
        }
        IterationStats {
            iteration: self.iteration,
            message_errors: me,
            bit_errors: be,
            per_position: pos,
        }
    }

    /// One decoding iteration; returns whether any message changed.
    ///
    /// Each constraint computes its syndromes once; a slot whose own incoming
    /// message already equals the substituted value reuses that decoding, the
    /// others toggle a single syndrome position.
    pub fn step(&mut self) -> bool {
        let n = self.code.n();
        let mut next = self.msg.clone();
        let mut word = vec![false; n];
        for c in 0..self.graph.constraints() {
            let edges = self.graph.socket_edges(c);
            for (s, &e) in edges.iter().enumerate() {
                word[s] = !TannerGraph::is_fixed(e) && self.msg[e as usize];
            }
            let syn = self.code.syndromes_from_support((0..n).filter(|&s| word[s]));
            let mut base: Option<Option<Vec<usize>>> = None;
            for (s, &e) in edges.iter().enumerate() {
                if TannerGraph::is_fixed(e) {
                    continue;
                }
                let b = e as usize / 2;
                let v = match self.rule {
                    SlotRule::ChannelValue => self.received[b],
                    SlotRule::OwnMessage => word[s],
                };
                let flipped = if v == word[s] {
                    let loc = base.get_or_insert_with(|| self.code.locate_errors(&syn));
                    loc.as_ref().is_some_and(|p| p.contains(&s))
                } else {
                    let mut alt = syn.clone();
                    self.code.toggle(&mut alt, s);
                    self.code.locate_errors(&alt).is_some_and(|p| p.contains(&s))
                };
                next[e as usize ^ 1] = v ^ flipped;
            }
        }
        let changed = next != self.msg;
        self.msg = next;
        self.iteration += 1;
        changed
    }

    /// Same update as [`step`](Self::step), decoding every candidate vector
    /// from scratch.
    pub fn step_reference(&mut self) -> bool {
        let n = self.code.n();
        let mut next = self.msg.clone();
        for c in 0..self.graph.constraints() {
            let edges = self.graph.socket_edges(c);
            let incoming: Vec<bool> = edges
                .iter()
                .map(|&e| !TannerGraph::is_fixed(e) && self.msg[e as usize])
                .collect();
            for (s, &e) in edges.iter().enumerate() {
                if TannerGraph::is_fixed(e) {
                    continue;
                }
                let mut v = Word::from_bits(&incoming);
                if self.rule == SlotRule::ChannelValue {
                    v.set(s, self.received[e as usize / 2]);
                }
                let out = self.code.bdd_decode(&v);
                next[e as usize ^ 1] = out.output(&v).get(s);
            }
            debug_assert_eq!(incoming.len(), n);
        }
        let changed = next != self.msg;
        self.msg = next;
        self.iteration += 1;
        changed
    }

    /// Iterates until success, a fixed point, or `max_iters`.
    pub fn run(&mut self, max_iters: usize, per_position: bool) -> (SimVerdict, Vec<IterationStats>) {
        let mut stats = vec![self.stats(per_position)];
        loop {
            if stats.last().unwrap().message_errors == 0 {
                return (SimVerdict::Success, stats);
            }
            if self.iteration >= max_iters {
                return (SimVerdict::IterationCap, stats);
            }
            let changed = self.step();
            stats.push(self.stats(per_position));
            if !changed && stats.last().unwrap().message_errors > 0 {
                return (SimVerdict::Failure, stats);
            }
        }
    }
}

/// A uniformly random codeword of the graph code (every constraint sees a
/// component codeword, fixed sockets read as zero).
pub fn random_codeword(graph: &TannerGraph, code: &ComponentCode, rng: &mut impl Rng) -> Vec<bool> {
    let nb = graph.bits();
    let limbs = nb.div_ceil(64);
    let cols = code.parity_check_columns();
    let r = code.n() - code.k();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for c in 0..graph.constraints() {
        let edges = graph.socket_edges(c);
        for j in 0..r {
            let mut row = vec![0u64; limbs];
            for (s, &e) in edges.iter().enumerate() {
                if !TannerGraph::is_fixed(e) && (cols[s][j / 64] >> (j % 64)) & 1 == 1 {
                    let b = e as usize / 2;
                    row[b / 64] ^= 1 << (b % 64);
                }
            }
            rows.push(row);
        }
    }
    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..nb {
        let Some(p) = (rank..rows.len()).find(|&i| (rows[i][col / 64] >> (col % 64)) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && (row[col / 64] >> (col % 64)) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let mut is_pivot = vec![false; nb];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut x = vec![false; nb];
    for (b, xb) in x.iter_mut().enumerate() {
        if !is_pivot[b] {
            *xb = rng.gen();
        }
    }
    for (i, &pc) in pivots.iter().enumerate() {
        let mut v = false;
        for (b, &xb) in x.iter().enumerate() {
            if b != pc && xb && (rows[i][b / 64] >> (b % 64)) & 1 == 1 {
                v ^= true;
            }
        }
        x[pc] = v;
    }
    x
}

/// Runs the decoder over BSC(`p`) noise drawn from `noise_seed`.
pub fn simulate_hdd(graph: &TannerGraph, code: &ComponentCode, p: f64, max_iters: usize, noise_seed: u64) -> Result<SimTrace> {
    simulate_hdd_with(
        graph,
        code,
        p,
        &SimOptions {
            max_iters,
            ..Default::default()
        },
        noise_seed,
    )
}

pub fn simulate_hdd_with(graph: &TannerGraph, code: &ComponentCode, p: f64, options: &SimOptions, noise_seed: u64) -> Result<SimTrace> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(format!("p = {p} outside [0,1]")));
    }
    let mut rng = rng_for(noise_seed, 1);
    let transmitted = match options.transmission {
        Transmission::AllZero => vec![false; graph.bits()],
        Transmission::RandomCodeword => random_codeword(graph, code, &mut rng),
    };
    let received: Vec<bool> = transmitted.iter().map(|&c| c ^ rng.gen_bool(p)).collect();
    let mut dec = HddDecoder::new(graph, code, transmitted, received, options.slot_rule)?;
    let (verdict, iterations) = dec.run(options.max_iters, options.per_position);
    Ok(SimTrace {
        p,
        graph_seed: graph.seed(),
        noise_seed,
        messages: 2 * graph.bits(),
        bits: graph.bits(),
        verdict,
        iterations,
    })
}
