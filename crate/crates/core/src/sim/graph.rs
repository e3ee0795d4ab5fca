use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng_for;
use crate::de::CouplingProfile;
use crate::error::{Error, Result};

const FIXED: u32 = u32::MAX;

/// Tanner graph with degree-2 bit nodes and degree-n constraint nodes.
///
/// Constraint sockets are numbered `constraint·n + socket`; bit edges are
/// numbered `2·bit + e` for the bit's two sockets `e ∈ {0, 1}`. In a coupled
/// graph the constraint sockets at the chain ends whose group would reach
/// past `[1, L]` are tied to a known zero bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    coupled: bool,
    profile: CouplingProfile,
    seed: u64,
    bits_per_position: usize,
    /// Constraint socket of each bit edge.
    edge_socket: Vec<u32>,
    /// Bit edge of each constraint socket, or `FIXED`.
    socket_edge: Vec<u32>,
}

/// Uncoupled `(C, m)` ensemble: `mn/2` bits, `m` constraints, uniform socket permutation.
pub fn sample_uncoupled_graph(n: usize, m: usize, seed: u64) -> Result<TannerGraph> {
    if !(m * n).is_multiple_of(2) {
        return Err(Error::config(format!("m*n must be even (m={m}, n={n})")));
    }
    TannerGraph::sample(n, m, CouplingProfile::uncoupled(), false, seed)
}

/// Coupled `(C, m, L, w)` ensemble.
pub fn sample_coupled_graph(n: usize, m: usize, profile: &CouplingProfile, seed: u64) -> Result<TannerGraph> {
    if !(m * n).is_multiple_of(2) || !(m * n).is_multiple_of(profile.w()) {
        return Err(Error::config(format!(
            "m*n must be divisible by 2 and by w (m={m}, n={n}, w={})",
            profile.w()
        )));
    }
    TannerGraph::sample(n, m, *profile, true, seed)
}

impl TannerGraph {
    fn sample(n: usize, m: usize, profile: CouplingProfile, coupled: bool, seed: u64) -> Result<Self> {
        if n < 2 || m == 0 {
            return Err(Error::config(format!("need n >= 2 and m >= 1 (n={n}, m={m})")));
        }
        let (l, w) = (profile.l(), profile.w());
        let mn = m * n;
        let group = mn / w;
        let bits_per_position = mn / 2;
        let total_sockets = profile.constraint_positions() * mn;
        if total_sockets >= FIXED as usize {
            return Err(Error::config("graph too large"));
        }
        let mut rng = rng_for(seed, 0);
        let mut edge_socket = vec![0u32; l * mn];
        let mut socket_edge = vec![FIXED; total_sockets];
        // Group j of bit position i feeds group w−1−j of constraint position i+j.
        let slot_socket = |i: usize, slot: usize| -> u32 {
            let (j, k) = (slot / group, slot % group);
            ((i + j) * mn + (w - 1 - j) * group + k) as u32
        };
        for i in 0..l {
            let mut slots: Vec<usize> = (0..mn).collect();
            slots.shuffle(&mut rng);
            let mut rounds = 0;
            loop {
                let colliding: Vec<usize> = (0..bits_per_position)
                    .filter(|&b| slot_socket(i, slots[2 * b]) / n as u32 == slot_socket(i, slots[2 * b + 1]) / n as u32)
                    .collect();
                if colliding.is_empty() {
                    break;
                }
                rounds += 1;
                if rounds > 10_000 {
                    return Err(Error::config(format!("could not avoid repeated sockets (m={m} too small)")));
                }
                for b in colliding {
                    let r = rng.gen_range(0..mn);
                    slots.swap(2 * b + 1, r);
                }
            }
            for (q, &slot) in slots.iter().enumerate() {
                let socket = slot_socket(i, slot);
                let edge = i * mn + q;
                edge_socket[edge] = socket;
                socket_edge[socket as usize] = edge as u32;
            }
        }
        Ok(Self {
            n,
            m,
            coupled,
            profile,
            seed,
            bits_per_position,
            edge_socket,
            socket_edge,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_coupled(&self) -> bool {
        self.coupled
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bits(&self) -> usize {
        self.edge_socket.len() / 2
    }

    pub fn constraints(&self) -> usize {
        self.socket_edge.len() / self.n
    }

    pub fn bit_positions(&self) -> usize {
        self.profile.l()
    }

    pub fn constraint_positions(&self) -> usize {
        self.profile.constraint_positions()
    }

    pub fn bits_per_position(&self) -> usize {
        self.bits_per_position
    }

    /// Bit position (0-based) of `bit`.
    pub fn bit_position(&self, bit: usize) -> usize {
        bit / self.bits_per_position
    }

    /// Constraint position (0-based) of `constraint`.
    pub fn constraint_position(&self, constraint: usize) -> usize {
        constraint / self.m
    }

    /// `(constraint, socket)` of both edges of `bit`.
    pub fn bit_neighbors(&self, bit: usize) -> [(usize, usize); 2] {
        let f = |e: usize| {
            let s = self.edge_socket[2 * bit + e] as usize;
            (s / self.n, s % self.n)
        };
        [f(0), f(1)]
    }

    /// `(bit, edge side)` attached to a constraint socket, `None` for a fixed zero.
    pub fn socket_bit(&self, constraint: usize, socket: usize) -> Option<(usize, usize)> {
        match self.socket_edge[constraint * self.n + socket] {
            FIXED => None,
            e => Some((e as usize / 2, e as usize % 2)),
        }
    }

    pub(crate) fn socket_edges(&self, constraint: usize) -> &[u32] {
        &self.socket_edge[constraint * self.n..(constraint + 1) * self.n]
    }

    pub(crate) fn is_fixed(edge: u32) -> bool {
        edge == FIXED
    }
}
