//! Chimera hardware graph and the row/column chain embedding of a fully
//! connected bipartite RBM.
//!
//! Qubits are indexed `8 · (row · size + col) + 4 · shore + k`. Within a
//! cell the two shores form a complete bipartite K4,4. Vertical-shore qubits
//! also couple to the same `k` in the cells above and below; horizontal-shore
//! qubits to the same `k` in the cells left and right.
//!
//! Visible unit `i` is the vertical chain in column `i / 4` at position
//! `i % 4`; hidden unit `j` is the horizontal chain in row `j / 4` at
//! position `j % 4`. Each visible chain crosses each hidden chain in exactly
//! one cell, where the intra-cell edge carries their coupling.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::Rng;

use crate::binary::BinaryVector;
use crate::error::{Error, LogicalUnit, Result};

use super::IsingProblem;

pub const DEFAULT_CHAIN_COUPLING: f64 = -2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shore {
    Vertical = 0,
    Horizontal = 1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChimeraGraph {
    size: usize,
    broken: BTreeSet<usize>,
}

impl ChimeraGraph {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Config("Chimera grid size must be at least 1".into()));
        }
        Ok(ChimeraGraph {
            size,
            broken: BTreeSet::new(),
        })
    }

    /// The 16 × 16 cell, 2048-qubit graph.
    pub fn c16() -> Self {
        ChimeraGraph::new(16).expect("non-zero size")
    }

    pub fn with_broken(mut self, qubits: impl IntoIterator<Item = usize>) -> Result<Self> {
        for q in qubits {
            if q >= self.num_qubits() {
                return Err(Error::Config(format!(
                    "broken qubit {q} outside a {}-qubit graph",
                    self.num_qubits()
                )));
            }
            self.broken.insert(q);
        }
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_qubits(&self) -> usize {
        8 * self.size * self.size
    }

    pub fn broken(&self) -> &BTreeSet<usize> {
        &self.broken
    }

    pub fn is_working(&self, q: usize) -> bool {
        q < self.num_qubits() && !self.broken.contains(&q)
    }

    pub fn qubit(&self, row: usize, col: usize, shore: Shore, k: usize) -> usize {
        debug_assert!(row < self.size && col < self.size && k < 4);
        8 * (row * self.size + col) + 4 * shore as usize + k
    }

    pub fn coordinates(&self, q: usize) -> (usize, usize, Shore, usize) {
        let cell = q / 8;
        let shore = if q % 8 < 4 { Shore::Vertical } else { Shore::Horizontal };
        (cell / self.size, cell % self.size, shore, q % 4)
    }

    /// Structural Chimera adjacency, ignoring broken qubits.
    fn structurally_adjacent(&self, a: usize, b: usize) -> bool {
        let (ra, ca, sa, ka) = self.coordinates(a);
        let (rb, cb, sb, kb) = self.coordinates(b);
        if ra == rb && ca == cb {
            return sa != sb;
        }
        if sa != sb || ka != kb {
            return false;
        }
        match sa {
            Shore::Vertical => ca == cb && ra.abs_diff(rb) == 1,
            Shore::Horizontal => ra == rb && ca.abs_diff(cb) == 1,
        }
    }

    /// True when both qubits work and share a Chimera edge.
    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.is_working(a) && self.is_working(b) && self.structurally_adjacent(a, b)
    }

    /// Working neighbours of a working qubit.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        if !self.is_working(q) {
            return Vec::new();
        }
        let (row, col, shore, k) = self.coordinates(q);
        let other = match shore {
            Shore::Vertical => Shore::Horizontal,
            Shore::Horizontal => Shore::Vertical,
        };
        let mut out: Vec<usize> = (0..4).map(|k2| self.qubit(row, col, other, k2)).collect();
        match shore {
            Shore::Vertical => {
                if row > 0 {
                    out.push(self.qubit(row - 1, col, shore, k));
                }
                if row + 1 < self.size {
                    out.push(self.qubit(row + 1, col, shore, k));
                }
            }
            Shore::Horizontal => {
                if col > 0 {
                    out.push(self.qubit(row, col - 1, shore, k));
                }
                if col + 1 < self.size {
                    out.push(self.qubit(row, col + 1, shore, k));
                }
            }
        }
        out.retain(|&n| self.is_working(n));
        out
    }

    pub fn num_edges(&self) -> usize {
        (0..self.num_qubits())
            .map(|q| self.neighbors(q).into_iter().filter(|&n| n > q).count())
            .sum()
    }
}

/// A logical visible–hidden pair and the physical edge that realises it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalCoupling {
    pub visible: usize,
    pub hidden: usize,
    pub visible_qubit: usize,
    pub hidden_qubit: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChimeraEmbedding {
    visible_chains: Vec<Vec<usize>>,
    hidden_chains: Vec<Vec<usize>>,
    chain_coupling: f64,
    couplings: Vec<LogicalCoupling>,
    missing: Vec<(usize, usize)>,
}

fn connected(chain: &[usize], graph: &ChimeraGraph) -> bool {
    let Some(&first) = chain.first() else {
        return false;
    };
    let members: HashSet<usize> = chain.iter().copied().collect();
    let mut seen = HashSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(q) = queue.pop_front() {
        for n in graph.neighbors(q) {
            if members.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == members.len()
}

/// Embeds `n_visible × n_hidden` units as vertical and horizontal chains.
///
/// Broken qubits are dropped from their chains. A chain left empty or split
/// into pieces is an error naming the logical unit. Pairs whose crossing
/// qubits are broken are recorded as missing couplings.
pub fn build_chimera_embedding(
    n_visible: usize,
    n_hidden: usize,
    graph: &ChimeraGraph,
    chain_coupling: f64,
) -> Result<ChimeraEmbedding> {
    let capacity = 4 * graph.size();
    if n_visible > capacity || n_hidden > capacity {
        return Err(Error::Config(format!(
            "a C{} graph holds at most {capacity} units per layer, requested {n_visible}×{n_hidden}",
            graph.size()
        )));
    }
    if !(chain_coupling < 0.0 && chain_coupling.is_finite()) {
        return Err(Error::Config(format!(
            "chain coupling must be negative (ferromagnetic), got {chain_coupling}"
        )));
    }
    let size = graph.size();

    let mut visible_chains = Vec::with_capacity(n_visible);
    for i in 0..n_visible {
        let chain: Vec<usize> = (0..size)
            .map(|row| graph.qubit(row, i / 4, Shore::Vertical, i % 4))
            .filter(|&q| graph.is_working(q))
            .collect();
        check_chain(LogicalUnit::Visible(i), &chain, graph)?;
        visible_chains.push(chain);
    }
    let mut hidden_chains = Vec::with_capacity(n_hidden);
    for j in 0..n_hidden {
        let chain: Vec<usize> = (0..size)
            .map(|col| graph.qubit(j / 4, col, Shore::Horizontal, j % 4))
            .filter(|&q| graph.is_working(q))
            .collect();
        check_chain(LogicalUnit::Hidden(j), &chain, graph)?;
        hidden_chains.push(chain);
    }

    let mut couplings = Vec::new();
    let mut missing = Vec::new();
    for i in 0..n_visible {
        for j in 0..n_hidden {
            let visible_qubit = graph.qubit(j / 4, i / 4, Shore::Vertical, i % 4);
            let hidden_qubit = graph.qubit(j / 4, i / 4, Shore::Horizontal, j % 4);
            if graph.is_edge(visible_qubit, hidden_qubit) {
                couplings.push(LogicalCoupling {
                    visible: i,
                    hidden: j,
                    visible_qubit,
                    hidden_qubit,
                });
            } else {
                missing.push((i, j));
            }
        }
    }

    Ok(ChimeraEmbedding {
        visible_chains,
        hidden_chains,
        chain_coupling,
        couplings,
        missing,
    })
}

fn check_chain(unit: LogicalUnit, chain: &[usize], graph: &ChimeraGraph) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::Embedding {
            unit,
            reason: "every qubit of the chain is broken".into(),
        });
    }
    if !connected(chain, graph) {
        return Err(Error::Embedding {
            unit,
            reason: "chain is disconnected by broken qubits".into(),
        });
    }
    Ok(())
}

impl ChimeraEmbedding {
    pub fn n_visible(&self) -> usize {
        self.visible_chains.len()
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden_chains.len()
    }

    pub fn visible_chains(&self) -> &[Vec<usize>] {
        &self.visible_chains
    }

    pub fn hidden_chains(&self) -> &[Vec<usize>] {
        &self.hidden_chains
    }

    pub fn chain_coupling(&self) -> f64 {
        self.chain_coupling
    }

    pub fn couplings(&self) -> &[LogicalCoupling] {
        &self.couplings
    }

    /// Logical pairs with no surviving physical edge.
    pub fn missing_couplings(&self) -> &[(usize, usize)] {
        &self.missing
    }

    pub fn chains(&self) -> impl Iterator<Item = (LogicalUnit, &[usize])> {
        let v = self
            .visible_chains
            .iter()
            .enumerate()
            .map(|(i, c)| (LogicalUnit::Visible(i), c.as_slice()));
        let h = self
            .hidden_chains
            .iter()
            .enumerate()
            .map(|(j, c)| (LogicalUnit::Hidden(j), c.as_slice()));
        v.chain(h)
    }

    /// Structural check: chains are non-empty, connected and pairwise
    /// disjoint, and every recorded coupling is a working edge between the
    /// two named chains.
    pub fn validate(&self, graph: &ChimeraGraph) -> Result<()> {
        let mut used = HashSet::new();
        for (unit, chain) in self.chains() {
            check_chain(unit, chain, graph)?;
            for &q in chain {
                if !used.insert(q) {
                    return Err(Error::Embedding {
                        unit,
                        reason: format!("qubit {q} is shared with another chain"),
                    });
                }
            }
        }
        for c in &self.couplings {
            let unit = LogicalUnit::Visible(c.visible);
            if !graph.is_edge(c.visible_qubit, c.hidden_qubit) {
                return Err(Error::Embedding {
                    unit,
                    reason: format!("coupling to hidden {} uses a non-edge", c.hidden),
                });
            }
            if !self.visible_chains[c.visible].contains(&c.visible_qubit)
                || !self.hidden_chains[c.hidden].contains(&c.hidden_qubit)
            {
                return Err(Error::Embedding {
                    unit,
                    reason: format!("coupling to hidden {} leaves its chains", c.hidden),
                });
            }
        }
        Ok(())
    }

    /// Places a logical problem (visible spins first, then hidden) on the
    /// physical qubits. Each logical field is split evenly across its chain,
    /// couplings go on their crossing edge, and every intra-chain edge gets
    /// the chain coupling. Missing couplings are dropped.
    pub fn embed_problem(&self, logical: &IsingProblem, graph: &ChimeraGraph) -> Result<IsingProblem> {
        let n = self.n_visible();
        crate::error::check_dim("logical spins", n + self.n_hidden(), logical.num_spins())?;
        let mut physical = IsingProblem::new(graph.num_qubits());
        for (index, (_, chain)) in self.chains().enumerate() {
            let share = logical.field(index) / chain.len() as f64;
            for &q in chain {
                physical.add_field(q, share)?;
            }
            for (a, &qa) in chain.iter().enumerate() {
                for &qb in &chain[a + 1..] {
                    if graph.is_edge(qa, qb) {
                        physical.add_coupling(qa, qb, self.chain_coupling)?;
                    }
                }
            }
        }
        for c in &self.couplings {
            let value = logical.coupling(c.visible, n + c.hidden);
            if value != 0.0 {
                physical.add_coupling(c.visible_qubit, c.hidden_qubit, value)?;
            }
        }
        Ok(physical)
    }
}

fn majority<R: Rng + ?Sized>(unit: LogicalUnit, chain: &[usize], raw: &[i8], rng: &mut R) -> Result<u8> {
    if chain.is_empty() {
        return Err(Error::Embedding {
            unit,
            reason: "empty chain".into(),
        });
    }
    let mut sum = 0i64;
    for &q in chain {
        match raw.get(q) {
            Some(&s) if s == 1 || s == -1 => sum += s as i64,
            Some(&s) => {
                return Err(Error::Domain {
                    domain: "bipolar",
                    index: q,
                    value: s as i64,
                })
            }
            None => {
                return Err(Error::Dimension {
                    what: "physical sample",
                    expected: q + 1,
                    found: raw.len(),
                })
            }
        }
    }
    Ok(match sum.cmp(&0) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => rng.random_bool(0.5) as u8,
    })
}

/// Majority vote over each chain of a physical sample; exact ties are
/// settled by a fair coin from `rng`. Visible chains are resolved first,
/// in index order, then hidden chains.
pub fn resolve_chains<R: Rng + ?Sized>(
    raw: &[i8],
    emb: &ChimeraEmbedding,
    rng: &mut R,
) -> Result<(BinaryVector, BinaryVector)> {
    let v = emb
        .visible_chains
        .iter()
        .enumerate()
        .map(|(i, c)| majority(LogicalUnit::Visible(i), c, raw, rng))
        .collect::<Result<Vec<u8>>>()?;
    let h = emb
        .hidden_chains
        .iter()
        .enumerate()
        .map(|(j, c)| majority(LogicalUnit::Hidden(j), c, raw, rng))
        .collect::<Result<Vec<u8>>>()?;
    Ok((
        BinaryVector::from_bits_unchecked(v),
        BinaryVector::from_bits_unchecked(h),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn cell_degrees() {
        let g = ChimeraGraph::new(3).unwrap();
        // Centre-cell qubits have 4 intra-cell plus 2 inter-cell neighbours.
        let q = g.qubit(1, 1, Shore::Vertical, 2);
        assert_eq!(g.neighbors(q).len(), 6);
        let corner = g.qubit(0, 0, Shore::Horizontal, 0);
        assert_eq!(g.neighbors(corner).len(), 5);
        // 16 intra edges per cell, plus 4 per adjacent cell pair in each direction.
        assert_eq!(g.num_edges(), 9 * 16 + 2 * 3 * 2 * 4);
        assert_eq!(ChimeraGraph::c16().num_qubits(), 2048);
    }

    #[test]
    fn adjacency_rule() {
        let g = ChimeraGraph::new(2).unwrap();
        let v = g.qubit(0, 0, Shore::Vertical, 1);
        assert!(g.is_edge(v, g.qubit(0, 0, Shore::Horizontal, 3)));
        assert!(!g.is_edge(v, g.qubit(0, 0, Shore::Vertical, 2)));
        assert!(g.is_edge(v, g.qubit(1, 0, Shore::Vertical, 1)));
        assert!(!g.is_edge(v, g.qubit(0, 1, Shore::Vertical, 1)));
        assert!(!g.is_edge(v, g.qubit(1, 0, Shore::Vertical, 2)));
        let h = g.qubit(0, 0, Shore::Horizontal, 1);
        assert!(g.is_edge(h, g.qubit(0, 1, Shore::Horizontal, 1)));
        assert!(!g.is_edge(h, g.qubit(1, 0, Shore::Horizontal, 1)));
        let g = g.with_broken([v]).unwrap();
        assert!(!g.is_edge(v, g.qubit(1, 0, Shore::Vertical, 1)));
    }

    #[test]
    fn single_cell_embedding() {
        let g = ChimeraGraph::new(1).unwrap();
        let e = build_chimera_embedding(4, 4, &g, DEFAULT_CHAIN_COUPLING).unwrap();
        assert!(e.chains().all(|(_, c)| c.len() == 1));
        assert_eq!(e.couplings().len(), 16);
        assert!(e.missing_couplings().is_empty());
        e.validate(&g).unwrap();
    }

    #[test]
    fn capacity_and_coupling_sign() {
        let g = ChimeraGraph::new(1).unwrap();
        assert!(build_chimera_embedding(5, 1, &g, -2.0).is_err());
        assert!(build_chimera_embedding(1, 1, &g, 2.0).is_err());
    }

    #[test]
    fn broken_end_qubit_shortens_chain() {
        let g = ChimeraGraph::new(2).unwrap();
        let end = g.qubit(1, 0, Shore::Vertical, 0);
        let g = g.with_broken([end]).unwrap();
        let e = build_chimera_embedding(8, 8, &g, -2.0).unwrap();
        assert_eq!(e.visible_chains()[0].len(), 1);
        // Visible 0 crosses hidden rows 4..8 at the broken qubit.
        assert_eq!(e.missing_couplings(), &[(0, 4), (0, 5), (0, 6), (0, 7)]);
        e.validate(&g).unwrap();
    }

    #[test]
    fn broken_middle_qubit_splits_chain() {
        let g = ChimeraGraph::new(3).unwrap();
        let mid = g.qubit(1, 1, Shore::Horizontal, 2);
        let g = g.with_broken([mid]).unwrap();
        let err = build_chimera_embedding(4, 8, &g, -2.0).unwrap_err();
        match err {
            Error::Embedding { unit, .. } => assert_eq!(unit, LogicalUnit::Hidden(6)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn fully_broken_chain() {
        let g = ChimeraGraph::new(1).unwrap();
        let q = g.qubit(0, 0, Shore::Vertical, 3);
        let g = g.with_broken([q]).unwrap();
        assert!(build_chimera_embedding(3, 4, &g, -2.0).is_ok());
        assert!(matches!(
            build_chimera_embedding(4, 4, &g, -2.0),
            Err(Error::Embedding {
                unit: LogicalUnit::Visible(3),
                ..
            })
        ));
    }

    #[test]
    fn majority_resolution() {
        let g = ChimeraGraph::c16();
        let e = build_chimera_embedding(1, 1, &g, -2.0).unwrap();
        let mut raw = vec![-1i8; g.num_qubits()];
        for &q in &e.visible_chains()[0] {
            raw[q] = 1;
        }
        let (v, h) = resolve_chains(&raw, &e, &mut seeded(0)).unwrap();
        assert_eq!((v.as_slice(), h.as_slice()), (&[1u8][..], &[0u8][..]));

        // 9 down, 7 up → 0.
        for (n, &q) in e.visible_chains()[0].iter().enumerate() {
            raw[q] = if n < 9 { -1 } else { 1 };
        }
        let (v, _) = resolve_chains(&raw, &e, &mut seeded(0)).unwrap();
        assert_eq!(v.as_slice(), &[0]);
    }

    #[test]
    fn tied_chain_is_a_seeded_coin_flip() {
        let g = ChimeraGraph::c16();
        let e = build_chimera_embedding(1, 1, &g, -2.0).unwrap();
        let mut raw = vec![-1i8; g.num_qubits()];
        for (n, &q) in e.visible_chains()[0].iter().enumerate() {
            raw[q] = if n % 2 == 0 { 1 } else { -1 };
        }
        let outcomes: Vec<u8> = (0..16)
            .map(|s| resolve_chains(&raw, &e, &mut seeded(s)).unwrap().0[0])
            .collect();
        assert_eq!(outcomes, GOLDEN_TIES);
        // The hidden chain is unanimous, so the tie consumes exactly one draw.
        for s in 0..16 {
            let expected = seeded(s).random_bool(0.5) as u8;
            assert_eq!(outcomes[s as usize], expected);
        }
    }

    const GOLDEN_TIES: [u8; 16] = [0, 1, 0, 0, 0, 1, 1, 1, 1, 1, 0, 1, 1, 1, 0, 0];

    #[test]
    fn resolve_rejects_short_sample() {
        let g = ChimeraGraph::new(2).unwrap();
        let e = build_chimera_embedding(2, 2, &g, -2.0).unwrap();
        assert!(resolve_chains(&[1, -1], &e, &mut seeded(0)).is_err());
    }
}
