//! The graph on transversals of `[2n]` (sets with one element from every
//! pair), joining two transversals whose union has `n + 1` elements.
//!
//! Transversals are indexed by their choice vector: bit `i` of the index
//! selects the upper element of pair `i + 1`. Neighbours differ in one bit,
//! so the graph is the `n`-dimensional hypercube.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::coloring::{Color, Coloring};
use crate::error::{Error, Result};
use crate::lattice::{ElementSet, Parity};
use crate::restrictive::transversal_bits;

pub const MAX_FLIP_GRAPH: u32 = 20;

#[derive(Clone, Debug)]
pub struct FlipGraph {
    n: u32,
    /// Transversal encodings, ascending; position = choice vector.
    vertices: Vec<u32>,
}

pub fn build_flip_graph(n: u32) -> Result<FlipGraph> {
    if n == 0 || n > MAX_FLIP_GRAPH {
        return Err(Error::Capacity(format!("flip graph needs 1 <= n <= {MAX_FLIP_GRAPH}, got {n}")));
    }
    let vertices = (0..1u32 << n).map(|choice| transversal_bits(choice, n)).collect();
    Ok(FlipGraph { n, vertices })
}

impl FlipGraph {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, index: usize) -> ElementSet {
        ElementSet::from_raw(self.vertices[index], 2 * self.n)
    }

    pub fn vertices(&self) -> impl Iterator<Item = ElementSet> + '_ {
        (0..self.vertices.len()).map(|i| self.vertex(i))
    }

    /// Indices of the neighbours of vertex `index`.
    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).map(move |i| index ^ (1 << i))
    }

    /// Edges as index pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertices.len()).flat_map(move |u| {
            let mut up: Vec<usize> = self.neighbors(u).filter(|&v| v > u).collect();
            up.sort_unstable();
            up.into_iter().map(move |v| (u, v))
        })
    }

    pub fn edge_count(&self) -> u64 {
        self.edges().count() as u64
    }

    /// One edge per line, `<u> <v>` as encoded vertex values with `u < v`,
    /// lines ascending.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let mut w = io::BufWriter::new(out);
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", self.vertices[u], self.vertices[v])?;
        }
        w.flush()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitionReport {
    pub n: u32,
    pub vertices: u64,
    pub edges: u64,
    /// Every vertex has degree `n`.
    pub regular: bool,
    pub connected: bool,
    pub bipartite: bool,
    /// Sizes of the side containing the first vertex and of the other side.
    pub class_sizes: (u64, u64),
    /// The two sides are exactly the even-sum and odd-sum transversals.
    pub matches_parity: bool,
}

impl BipartitionReport {
    pub fn all_hold(&self) -> bool {
        self.regular
            && self.connected
            && self.bipartite
            && self.matches_parity
            && self.edges == u64::from(self.n) << (self.n - 1)
    }
}

/// Two-colours the graph by breadth-first layering from vertex 0 and
/// compares the sides with the element-sum parity classes.
pub fn check_bipartition(g: &FlipGraph) -> BipartitionReport {
    let count = g.vertex_count();
    let mut side: Vec<Option<bool>> = vec![None; count];
    let mut queue = VecDeque::new();
    let mut bipartite = true;
    side[0] = Some(false);
    queue.push_back(0usize);
    let mut reached = 1usize;
    while let Some(u) = queue.pop_front() {
        let su = side[u].expect("queued vertices are coloured");
        for v in g.neighbors(u) {
            match side[v] {
                None => {
                    side[v] = Some(!su);
                    reached += 1;
                    queue.push_back(v);
                }
                Some(sv) if sv == su => bipartite = false,
                Some(_) => {}
            }
        }
    }
    let connected = reached == count;

    let mut regular = true;
    for u in 0..count {
        let mut nbrs: Vec<usize> = g.neighbors(u).collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        let genuine = nbrs.iter().all(|&v| {
            v != u && (g.vertices[u] | g.vertices[v]).count_ones() == g.n + 1
        });
        regular &= genuine && nbrs.len() == g.n as usize;
    }

    let first_parity = g.vertex(0).element_sum_parity();
    let matches_parity = connected
        && (0..count).all(|u| {
            let same_side_as_first = side[u] == Some(false);
            (g.vertex(u).element_sum_parity() == first_parity) == same_side_as_first
        });
    let first_side = side.iter().filter(|s| **s == Some(false)).count() as u64;
    BipartitionReport {
        n: g.n,
        vertices: count as u64,
        edges: g.edge_count(),
        regular,
        connected,
        bipartite,
        class_sizes: (first_side, count as u64 - first_side),
        matches_parity,
    }
}

/// If the Red transversals of `coloring` are exactly one parity class and
/// the Blue ones the other, returns the parity of the Red class.
pub fn transversal_parity_of_red(coloring: &Coloring, n: u32) -> Result<Option<Parity>> {
    if coloring.space().ground_size() != 2 * n {
        return Err(Error::Usage(format!(
            "coloring of 2^[{}] has no transversals for n = {n}",
            coloring.space().ground_size()
        )));
    }
    let g = build_flip_graph(n)?;
    let mut red_parity = None;
    for s in g.vertices() {
        let parity = s.element_sum_parity();
        let red = coloring.color_of(s)? == Color::Red;
        let implied = if red { parity } else { flip(parity) };
        match red_parity {
            None => red_parity = Some(implied),
            Some(p) if p != implied => return Ok(None),
            Some(_) => {}
        }
    }
    Ok(red_parity)
}

fn flip(p: Parity) -> Parity {
    match p {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::has_pair;

    /// Independent construction: every pair-free n-subset of [2n], every
    /// pair of them tested for a union of size n + 1.
    fn oracle(n: u32) -> (Vec<u32>, Vec<(u32, u32)>) {
        let vertices: Vec<u32> = (0..1u32 << (2 * n))
            .filter(|s| s.count_ones() == n && !has_pair(*s))
            .collect();
        let mut edges = Vec::new();
        for (i, &a) in vertices.iter().enumerate() {
            for &b in &vertices[i + 1..] {
                if (a | b).count_ones() == n + 1 {
                    edges.push((a, b));
                }
            }
        }
        (vertices, edges)
    }

    #[test]
    fn matches_pairwise_oracle() {
        for n in 1..=6 {
            let g = build_flip_graph(n).unwrap();
            let (vertices, edges) = oracle(n);
            let mine: Vec<u32> = g.vertices().map(|s| s.bits()).collect();
            assert_eq!(mine, vertices);
            let mut mine_edges: Vec<(u32, u32)> = g.edges().map(|(u, v)| (g.vertices[u], g.vertices[v])).collect();
            mine_edges.sort_unstable();
            assert_eq!(mine_edges, edges, "n={n}");
        }
    }

    #[test]
    fn small_cases() {
        let g1 = build_flip_graph(1).unwrap();
        assert_eq!(g1.vertices().map(|s| s.to_string()).collect::<Vec<_>>(), vec!["{1}", "{2}"]);
        assert_eq!(g1.edge_count(), 1);
        let g2 = build_flip_graph(2).unwrap();
        assert_eq!((g2.vertex_count(), g2.edge_count()), (4, 4));
        let g3 = build_flip_graph(3).unwrap();
        assert_eq!((g3.vertex_count(), g3.edge_count()), (8, 12));
    }

    #[test]
    fn bipartition_small_cases() {
        let r1 = check_bipartition(&build_flip_graph(1).unwrap());
        assert!(r1.all_hold());
        assert_eq!(r1.class_sizes, (1, 1));
        // {1} has odd sum and sits on the first side.
        assert_eq!(build_flip_graph(1).unwrap().vertex(0).element_sum_parity(), Parity::Odd);
        let r2 = check_bipartition(&build_flip_graph(2).unwrap());
        assert_eq!(r2.class_sizes, (2, 2));
        let r3 = check_bipartition(&build_flip_graph(3).unwrap());
        assert!(r3.all_hold());
        assert_eq!(r3.class_sizes, (4, 4));
    }

    #[test]
    fn edge_list_export() {
        let mut out = Vec::new();
        build_flip_graph(2).unwrap().write_edge_list(&mut out).unwrap();
        // transversals of [4]: {1,3}=5, {2,3}=6, {1,4}=9, {2,4}=10
        assert_eq!(String::from_utf8(out).unwrap(), "5 6\n5 9\n6 10\n9 10\n");
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(build_flip_graph(0), Err(Error::Capacity(_))));
        assert!(matches!(build_flip_graph(21), Err(Error::Capacity(_))));
    }

    #[test]
    fn c0_transversals_follow_parity() {
        for n in 1..=10 {
            let c = Coloring::c0(n).unwrap();
            assert_eq!(transversal_parity_of_red(&c, n).unwrap(), Some(Parity::Odd));
        }
        let mut broken = Coloring::c0(3).unwrap();
        let t = ElementSet::from_elements(&[2, 3, 5], 6).unwrap();
        broken.set_color(t, Color::Red).unwrap();
        assert_eq!(transversal_parity_of_red(&broken, 3).unwrap(), None);
    }
}
