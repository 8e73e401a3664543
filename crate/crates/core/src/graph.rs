//! Protocol graphs: bipartite graphs split into a test region `V1` and a
//! witness region `V2`.
//!
//! Qubit order is fixed at build time: black `V1` vertices, then white `V1`
//! vertices, then `V2`, each group sorted by vertex id. Every bit-string and
//! register in the crate follows this order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::pauli::{Pauli, PauliString};
use crate::scalar::Scalar;
use crate::state::QuantumState;
use crate::tableau::StabilizerTableau;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn other(self) -> Self {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    fn symbol(self) -> char {
        match self {
            Color::Black => 'b',
            Color::White => 'w',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    V1,
    V2,
}

/// Which graph a stabilizer or graph state is taken relative to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subgraph {
    /// The whole graph `G`.
    Full,
    /// `G′`: `V1 ∪ V_connect` with the edges `E1 ∪ E_connect`.
    Connected,
    /// `G″`: `V1` with the edges `E1`.
    Inner,
}

impl fmt::Display for Subgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subgraph::Full => "G",
            Subgraph::Connected => "G'",
            Subgraph::Inner => "G''",
        })
    }
}

#[derive(Clone, Debug)]
struct VertexSpec {
    id: usize,
    color: Option<Color>,
    region: Region,
}

/// Unvalidated graph description.
#[derive(Clone, Debug, Default)]
pub struct GraphSpec {
    vertices: Vec<VertexSpec>,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex whose color is inferred from the bipartition.
    pub fn vertex(mut self, id: usize, region: Region) -> Self {
        self.vertices.push(VertexSpec { id, color: None, region });
        self
    }

    pub fn colored_vertex(mut self, id: usize, color: Color, region: Region) -> Self {
        self.vertices.push(VertexSpec { id, color: Some(color), region });
        self
    }

    pub fn edge(mut self, a: usize, b: usize) -> Self {
        self.edges.push((a, b));
        self
    }

    /// A `rows × cols` square lattice. Vertex `(r, c)` has id `r·cols + c`
    /// and color black iff `r + c` is even.
    pub fn grid(rows: usize, cols: usize, in_v1: impl Fn(usize, usize) -> bool) -> Self {
        let mut spec = Self::new();
        for r in 0..rows {
            for c in 0..cols {
                let color = if (r + c) % 2 == 0 { Color::Black } else { Color::White };
                let region = if in_v1(r, c) { Region::V1 } else { Region::V2 };
                spec = spec.colored_vertex(r * cols + c, color, region);
            }
        }
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                if c + 1 < cols {
                    spec = spec.edge(id, id + 1);
                }
                if r + 1 < rows {
                    spec = spec.edge(id, id + cols);
                }
            }
        }
        spec
    }

    /// Parses the text format: a header `N M`, `N` lines `id color region`
    /// (`b`/`w`, `1`/`2`), then `M` lines `i j`. Blank lines and `#`
    /// comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        let [n, m] = nums[..] else {
            return Err(Error::parse(hl, "header must be `N M`"));
        };
        let n: usize = n.parse().map_err(|_| Error::parse(hl, "bad vertex count"))?;
        let m: usize = m.parse().map_err(|_| Error::parse(hl, "bad edge count"))?;
        let mut spec = Self::new();
        for _ in 0..n {
            let (ln, line) = lines.next().ok_or_else(|| Error::parse(hl, "too few vertex lines"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [id, color, region] = fields[..] else {
                return Err(Error::parse(ln, "vertex line must be `id color region`"));
            };
            let id = id.parse().map_err(|_| Error::parse(ln, "bad vertex id"))?;
            let color = match color {
                "b" | "B" => Color::Black,
                "w" | "W" => Color::White,
                _ => return Err(Error::parse(ln, "color must be `b` or `w`")),
            };
            let region = match region {
                "1" => Region::V1,
                "2" => Region::V2,
                _ => return Err(Error::parse(ln, "region must be `1` or `2`")),
            };
            spec = spec.colored_vertex(id, color, region);
        }
        for _ in 0..m {
            let (ln, line) = lines.next().ok_or_else(|| Error::parse(hl, "too few edge lines"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [a, b] = fields[..] else {
                return Err(Error::parse(ln, "edge line must be `i j`"));
            };
            let a = a.parse().map_err(|_| Error::parse(ln, "bad edge endpoint"))?;
            let b = b.parse().map_err(|_| Error::parse(ln, "bad edge endpoint"))?;
            spec = spec.edge(a, b);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content after edge list"));
        }
        Ok(spec)
    }

    pub fn build(&self) -> Result<ProtocolGraph> {
        let mut index: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(Error::GraphValidation(format!("duplicate vertex id {}", v.id)));
            }
        }
        let count = self.vertices.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
        for &(a, b) in &self.edges {
            let ia = *index
                .get(&a)
                .ok_or_else(|| Error::GraphValidation(format!("edge ({a}, {b}) has undeclared endpoint {a}")))?;
            let ib = *index
                .get(&b)
                .ok_or_else(|| Error::GraphValidation(format!("edge ({a}, {b}) has undeclared endpoint {b}")))?;
            if ia == ib {
                return Err(Error::GraphValidation(format!("self-loop on vertex {a}")));
            }
            if !adj[ia].insert(ib) {
                return Err(Error::GraphValidation(format!("duplicate edge ({a}, {b})")));
            }
            adj[ib].insert(ia);
        }

        // Two-color each component from its first vertex, seeding with the
        // declared color when there is one.
        let mut colors: Vec<Option<Color>> = vec![None; count];
        for root in 0..count {
            if colors[root].is_some() {
                continue;
            }
            colors[root] = Some(self.vertices[root].color.unwrap_or(Color::Black));
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                let cv = colors[v].expect("queued vertices are colored");
                for &w in &adj[v] {
                    match colors[w] {
                        None => {
                            colors[w] = Some(cv.other());
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cv => {
                            return Err(Error::NonBipartite(format!(
                                "odd cycle through vertices {} and {}",
                                self.vertices[v].id, self.vertices[w].id
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        for (v, spec) in self.vertices.iter().enumerate() {
            if let Some(c) = spec.color {
                if Some(c) != colors[v] {
                    return Err(Error::GraphValidation(format!(
                        "declared coloring is not proper at vertex {}",
                        spec.id
                    )));
                }
            }
        }

        let group = |v: usize| match (self.vertices[v].region, colors[v]) {
            (Region::V1, Some(Color::Black)) => 0,
            (Region::V1, _) => 1,
            (Region::V2, _) => 2,
        };
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&v| (group(v), self.vertices[v].id));
        let mut qubit_of = vec![0; count];
        for (q, &v) in order.iter().enumerate() {
            qubit_of[v] = q;
        }

        let n1b = order.iter().filter(|&&v| group(v) == 0).count();
        let n1 = order.iter().filter(|&&v| group(v) < 2).count();
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(self.edges.len());
        let mut neighbors = vec![Vec::new(); count];
        for (v, set) in adj.iter().enumerate() {
            let qv = qubit_of[v];
            for &w in set {
                let qw = qubit_of[w];
                neighbors[qv].push(qw);
                if qv < qw {
                    edges.push((qv, qw));
                }
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        edges.sort_unstable();
        let in_connect = (0..count)
            .map(|q| q >= n1 && neighbors[q].iter().any(|&w| w < n1))
            .collect();

        Ok(ProtocolGraph {
            ids: order.iter().map(|&v| self.vertices[v].id).collect(),
            colors: order.iter().map(|&v| colors[v].expect("all vertices colored")).collect(),
            n1b,
            n1,
            edges,
            neighbors,
            in_connect,
        })
    }
}

/// Validated protocol graph. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolGraph {
    ids: Vec<usize>,
    colors: Vec<Color>,
    n1b: usize,
    n1: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    in_connect: Vec<bool>,
}

impl ProtocolGraph {
    pub fn parse(text: &str) -> Result<Self> {
        GraphSpec::parse(text)?.build()
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_v1(&self) -> usize {
        self.n1
    }

    pub fn num_v2(&self) -> usize {
        self.ids.len() - self.n1
    }

    pub fn v1(&self) -> Range<usize> {
        0..self.n1
    }

    pub fn v1_black(&self) -> Range<usize> {
        0..self.n1b
    }

    pub fn v1_white(&self) -> Range<usize> {
        self.n1b..self.n1
    }

    pub fn v2(&self) -> Range<usize> {
        self.n1..self.ids.len()
    }

    pub fn v_connect(&self) -> Vec<usize> {
        self.v2().filter(|&q| self.in_connect[q]).collect()
    }

    pub fn id_of(&self, qubit: usize) -> usize {
        self.ids[qubit]
    }

    pub fn qubit_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn color(&self, qubit: usize) -> Color {
        self.colors[qubit]
    }

    pub fn region(&self, qubit: usize) -> Region {
        if qubit < self.n1 {
            Region::V1
        } else {
            Region::V2
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges with both endpoints in `V1`.
    pub fn e1(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().filter(|&(_, b)| b < self.n1).collect()
    }

    /// Edges between `V1` and `V2`.
    pub fn e_connect(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().filter(|&(a, b)| a < self.n1 && b >= self.n1).collect()
    }

    pub fn contains(&self, qubit: usize, sub: Subgraph) -> bool {
        match sub {
            Subgraph::Full => qubit < self.ids.len(),
            Subgraph::Connected => qubit < self.n1 || self.in_connect.get(qubit) == Some(&true),
            Subgraph::Inner => qubit < self.n1,
        }
    }

    pub fn edges_of(&self, sub: Subgraph) -> Vec<(usize, usize)> {
        match sub {
            Subgraph::Full => self.edges.clone(),
            Subgraph::Connected => self.edges.iter().copied().filter(|&(a, _)| a < self.n1).collect(),
            Subgraph::Inner => self.e1(),
        }
    }

    /// Vertices of `sub` in qubit order.
    pub fn vertices_of(&self, sub: Subgraph) -> Vec<usize> {
        (0..self.ids.len()).filter(|&q| self.contains(q, sub)).collect()
    }

    /// Neighbors of `qubit` in the whole graph.
    pub fn neighbors(&self, qubit: usize) -> &[usize] {
        &self.neighbors[qubit]
    }

    /// The neighbor set `S_j` of `qubit` within `sub`.
    pub fn neighbors_in(&self, qubit: usize, sub: Subgraph) -> Result<Vec<usize>> {
        self.check_member(qubit, sub)?;
        Ok(match sub {
            Subgraph::Full => self.neighbors[qubit].clone(),
            // Edges of G′ always touch V1.
            Subgraph::Connected if qubit < self.n1 => self.neighbors[qubit].clone(),
            Subgraph::Connected | Subgraph::Inner => {
                self.neighbors[qubit].iter().copied().filter(|&w| w < self.n1).collect()
            }
        })
    }

    fn check_member(&self, qubit: usize, sub: Subgraph) -> Result<()> {
        if qubit >= self.ids.len() {
            return Err(Error::IndexOutOfRange { index: qubit, n: self.ids.len() });
        }
        if !self.contains(qubit, sub) {
            let subgraph = match sub {
                Subgraph::Full => "G",
                Subgraph::Connected => "G'",
                Subgraph::Inner => "G''",
            };
            return Err(Error::NotInSubgraph { vertex: self.ids[qubit], subgraph });
        }
        Ok(())
    }

    /// `g_j = X_j ∏_{i∈S_j} Z_i` on the full register, `S_j` taken in `sub`.
    pub fn stabilizer_generator(&self, qubit: usize, sub: Subgraph) -> Result<PauliString> {
        let n = self.ids.len();
        let mut g = PauliString::on(n, self.neighbors_in(qubit, sub)?, Pauli::Z);
        g.set(qubit, Pauli::X);
        Ok(g)
    }

    /// All generators of `sub` in qubit order.
    pub fn stabilizer_generators(&self, sub: Subgraph) -> Vec<PauliString> {
        self.vertices_of(sub)
            .into_iter()
            .map(|q| self.stabilizer_generator(q, sub).expect("member of subgraph"))
            .collect()
    }

    /// Graph state of `sub` on the full register. Vertices outside `sub`
    /// are left in `|+⟩`.
    pub fn graph_state(&self, sub: Subgraph) -> StabilizerTableau {
        let mut t = StabilizerTableau::plus_state(self.ids.len());
        for (a, b) in self.edges_of(sub) {
            t.apply_gate(Gate::Cz(a, b)).expect("edge endpoints are in range");
        }
        t
    }

    /// `|G_u⟩ = ∏ Z_j^{u_j} |G⟩`.
    pub fn gu_state(&self, u: &BitString) -> Result<StabilizerTableau> {
        self.gu_state_in(Subgraph::Full, u)
    }

    /// `Z^u` applied to the graph state of `sub`.
    pub fn gu_state_in(&self, sub: Subgraph, u: &BitString) -> Result<StabilizerTableau> {
        self.check_pattern(u)?;
        let mut t = self.graph_state(sub);
        t.apply_pauli(&PauliString::z_pattern(u))?;
        Ok(t)
    }

    pub fn dense_graph_state<T: Scalar>(&self, sub: Subgraph) -> Result<DenseState<T>> {
        let mut s = DenseState::plus(self.ids.len())?;
        for (a, b) in self.edges_of(sub) {
            s.apply_gate(Gate::Cz(a, b))?;
        }
        Ok(s)
    }

    pub fn check_pattern(&self, u: &BitString) -> Result<()> {
        if u.len() != self.ids.len() {
            return Err(Error::DimensionMismatch { expected: self.ids.len(), found: u.len() });
        }
        Ok(())
    }

    /// The layer `W` of CZ gates over every `E_connect` edge.
    pub fn entangling_layer(&self) -> EntanglingLayer {
        EntanglingLayer { pairs: self.e_connect() }
    }

    /// Canonical text form using the original vertex ids.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.ids.len(), self.edges.len());
        let mut by_id: Vec<usize> = (0..self.ids.len()).collect();
        by_id.sort_by_key(|&q| self.ids[q]);
        for q in by_id {
            let region = if q < self.n1 { 1 } else { 2 };
            out.push_str(&format!("{} {} {}\n", self.ids[q], self.colors[q].symbol(), region));
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (self.ids[a], self.ids[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        for (a, b) in edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }
}

impl fmt::Display for ProtocolGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// An ordered list of CZ pairs drawn from `E_connect`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntanglingLayer {
    pairs: Vec<(usize, usize)>,
}

impl EntanglingLayer {
    pub fn new(graph: &ProtocolGraph, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let allowed = graph.e_connect();
        for &(a, b) in &pairs {
            if !allowed.contains(&(a.min(b), a.max(b))) {
                return Err(Error::GraphValidation(format!("pair ({a}, {b}) is not an E_connect edge")));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn apply<S: QuantumState>(&self, state: &mut S) -> Result<()> {
        for &(a, b) in &self.pairs {
            state.apply_gate(Gate::Cz(a, b))?;
        }
        Ok(())
    }

    /// Conjugates a Pauli operator by the layer (`W P W†`).
    pub fn conjugate(&self, p: &mut PauliString) {
        for &(a, b) in &self.pairs {
            Gate::Cz(a, b).conjugate(p);
        }
    }
}

pub fn apply_entangling_layer<S: QuantumState>(state: &mut S, layer: &EntanglingLayer) -> Result<()> {
    layer.apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> ProtocolGraph {
        GraphSpec::new()
            .vertex(10, Region::V1)
            .vertex(11, Region::V1)
            .vertex(12, Region::V1)
            .edge(10, 11)
            .edge(11, 12)
            .build()
            .unwrap()
    }

    #[test]
    fn path_generator_is_xz_pattern() {
        let g = path3();
        let b = g.qubit_of(11).unwrap();
        let gen = g.stabilizer_generator(b, Subgraph::Full).unwrap();
        assert_eq!(gen.get(b), Pauli::X);
        for id in [10, 12] {
            assert_eq!(gen.get(g.qubit_of(id).unwrap()), Pauli::Z);
        }
        assert_eq!(gen.weight(), 3);
    }

    #[test]
    fn blacks_come_first() {
        let g = path3();
        // The middle vertex is the lone vertex of its color class.
        assert_eq!(g.v1_black().len() + g.v1_white().len(), 3);
        for q in g.v1_black() {
            assert_eq!(g.color(q), Color::Black);
        }
        for q in g.v1_white() {
            assert_eq!(g.color(q), Color::White);
        }
    }

    #[test]
    fn triangle_is_rejected() {
        let err = GraphSpec::new()
            .vertex(0, Region::V1)
            .vertex(1, Region::V1)
            .vertex(2, Region::V1)
            .edge(0, 1)
            .edge(1, 2)
            .edge(2, 0)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::NonBipartite(_)));
    }

    #[test]
    fn dangling_endpoint_and_duplicates_are_rejected() {
        let dangling = GraphSpec::new().vertex(0, Region::V1).edge(0, 7).build();
        assert!(matches!(dangling, Err(Error::GraphValidation(_))));
        let dup = GraphSpec::new()
            .vertex(0, Region::V1)
            .vertex(1, Region::V1)
            .edge(0, 1)
            .edge(1, 0)
            .build();
        assert!(matches!(dup, Err(Error::GraphValidation(_))));
        let selfloop = GraphSpec::new().vertex(0, Region::V1).edge(0, 0).build();
        assert!(matches!(selfloop, Err(Error::GraphValidation(_))));
    }

    #[test]
    fn improper_declared_coloring_is_rejected() {
        let r = GraphSpec::new()
            .colored_vertex(0, Color::Black, Region::V1)
            .colored_vertex(1, Color::Black, Region::V1)
            .edge(0, 1)
            .build();
        assert!(matches!(r, Err(Error::GraphValidation(_))));
    }

    #[test]
    fn text_round_trip() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let text = g.to_text();
        let again = ProtocolGraph::parse(&text).unwrap();
        assert_eq!(g, again);
        assert_eq!(again.to_text(), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = ProtocolGraph::parse("2 1\n0 b 1\n1 x 1\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn outside_vertex_is_a_domain_error() {
        let g = GraphSpec::grid(2, 3, |_, c| c < 2).build().unwrap();
        let far = g.qubit_of(2).unwrap();
        assert!(matches!(g.stabilizer_generator(far, Subgraph::Inner), Err(Error::NotInSubgraph { .. })));
    }

    #[test]
    fn isolated_vertex_generator_is_bare_x() {
        let g = GraphSpec::new().vertex(0, Region::V1).build().unwrap();
        assert_eq!(g.stabilizer_generator(0, Subgraph::Full).unwrap().to_string(), "+X");
    }
}
